#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dirac/chebyshev.hpp"
#include "dirac/grid.hpp"

namespace dirac {

enum class DisorderKind { Potential, Mass };

const char* to_string(DisorderKind kind) noexcept;
DisorderKind parse_disorder_kind(const std::string& text);

/// Potential kind: V_j = mean_potential + U[-s, s], m_j = mean_mass.
/// Mass kind:      m_j = U[mean_mass - s, mean_mass + s], V_j = mean_potential.
struct DisorderSpec {
  DisorderKind kind = DisorderKind::Potential;
  double strength = 0.0;
  double mean_mass = 500.0;
  double mean_potential = 0.0;

  void validate() const;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t z) noexcept;

/// Per-sample seed from (master_seed, sample_index).
std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t sample_index) noexcept;

/// Counter-based stream: the `counter`-th SplitMix64 output for state `key`, mapped to [0, 1).
double uniform_draw(std::uint64_t key, std::uint64_t counter) noexcept;

struct DisorderSample {
  std::vector<double> potential;
  std::vector<double> mass;
};

/// One draw per node; node j always consumes counter j.
DisorderSample sample_disorder(const DisorderSpec& spec, const Grid1D& grid, std::uint64_t seed);

/// Snapshot times i * t_end / n_intervals, i = 0..n_intervals.
struct Schedule {
  double t_end = 0.71064;
  std::size_t n_intervals = 128;

  std::vector<double> times() const;
};

enum class FailurePolicy { Abort, Exclude };

struct EnsembleSetup {
  Grid1D grid{-1.0, 1.0, 1024};
  GaussianSpec initial{0.04};
  OrderPolicy policy = OrderPolicy::automatic();
  Schedule schedule;
  PropagationOptions propagation;
  std::size_t threads = 0;  // 0: hardware concurrency
  FailurePolicy failure = FailurePolicy::Abort;
  double max_failure_fraction = 0.01;
};

inline constexpr double kDefaultTStar = 0.71064;

/// W at every scheduled time for one disorder realization.
std::vector<double> run_sample(const DisorderSpec& spec, const EnsembleSetup& setup, std::uint64_t seed);

struct EnsembleResult {
  DisorderSpec spec;
  std::vector<double> times;
  std::vector<double> w_mean;
  std::vector<double> w_std;  // population standard deviation
  std::vector<double> w_sem;  // w_std / sqrt(n_samples)
  std::size_t n_samples = 0;  // successful samples
  std::size_t n_failed = 0;
  std::uint64_t master_seed = 0;
};

/// Mean and spread of W(t) over samples. Reductions run in sample order with
/// pairwise summation, so the result does not depend on the thread count.
EnsembleResult run_ensemble(const DisorderSpec& spec, std::size_t n_samples, const EnsembleSetup& setup,
                            std::uint64_t master_seed);

/// Deterministic pairwise sum.
double pairwise_sum(std::span<const double> values);

struct SweepPoint {
  double strength = 0.0;
  double w_mean = 0.0;
  double w_std = 0.0;
  double w_sem = 0.0;
  std::size_t n_samples = 0;
};

struct SweepResult {
  DisorderKind kind = DisorderKind::Potential;
  double t_star = kDefaultTStar;
  std::uint64_t master_seed = 0;
  std::vector<EnsembleResult> ensembles;
  std::vector<SweepPoint> points;  // W at t_star
};

std::vector<double> default_strengths(DisorderKind kind);

/// One ensemble per strength, all keyed by the same master seed; W reported at schedule.t_end.
SweepResult sweep_strengths(DisorderKind kind, std::span<const double> strengths, std::size_t n_samples,
                            const EnsembleSetup& setup, std::uint64_t master_seed, double mean_mass = 500.0,
                            double mean_potential = 0.0);

/// Index of the largest |DFT|^2 bin in 1..N/2 after removing a least-squares line.
std::size_t dominant_frequency_bin(std::span<const double> series);

/// Columns t, W_mean, W_std, n_samples.
void write_ensemble_width_csv(std::ostream& out, const EnsembleResult& result);
/// Columns t, W_std, W_sem, n_samples.
void write_ensemble_spread_csv(std::ostream& out, const EnsembleResult& result);
/// Columns s, t_star, W_mean, W_std, n_samples, master_seed, d_x, n_points, W_sem.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const Grid1D& grid);

}  // namespace dirac
