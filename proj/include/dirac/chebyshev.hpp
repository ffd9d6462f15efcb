#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dirac/free_analytic.hpp"
#include "dirac/grid.hpp"
#include "dirac/operators.hpp"

namespace dirac {

/// J_k(a) for integer k >= 0, a >= 0 (Miller downward recurrence).
double bessel_j(int k, double a);

/// J_0(a) .. J_kmax(a) from a single downward sweep.
std::vector<double> bessel_table(int kmax, double a);

/// A_k = (2 - delta_k0) (-i)^k J_k(a), k = 0..order.
std::vector<cplx> chebyshev_coefficients(double a, std::size_t order);

struct OrderPolicy {
  enum class Kind { Auto, Fixed, Paper };
  Kind kind = Kind::Auto;
  double tolerance = 1e-14;  // Auto
  std::size_t order = 2;     // Fixed

  static OrderPolicy automatic(double tol = 1e-14) { return {Kind::Auto, tol, 0}; }
  static OrderPolicy fixed(std::size_t k) { return {Kind::Fixed, 0.0, k}; }
  /// Second-order series with the step limited to a <= kPaperMaxA.
  static OrderPolicy paper() { return {Kind::Paper, 0.0, 2}; }
};

inline constexpr double kPaperMaxA = 0.05;

struct ChebyshevPlan {
  SpectralInterval interval;
  double dt = 0.0;
  double a = 0.0;  // dt (e_max - e_min) / 2
  std::size_t order = 0;
  std::vector<cplx> coeffs;
  cplx global_phase{1.0, 0.0};
};

/// Smallest K with |J_{K+1}(a)| + |J_{K+2}(a)| < tol.
std::size_t auto_order(double a, double tol);

ChebyshevPlan make_plan(const SpectralInterval& interval, double dt, const OrderPolicy& policy,
                        const WarningSink& warn = {});

/// (2 H psi - (e_max + e_min) psi) / (e_max - e_min).
SpinorField apply_scaled(const HamiltonianOperator& h, const SpectralInterval& interval, const SpinorField& field);

/// Reusable buffers for the three-term recurrence on flat [upper, lower] vectors.
class ChebyshevWorkspace {
 public:
  explicit ChebyshevWorkspace(std::size_t n_points = 0);

  /// state <- e^{-i dt H} state. Throws NormBlowup if the norm grows by more than 1e-3.
  void step(const ChebyshevPlan& plan, const HamiltonianOperator& h, std::vector<cplx>& state);

 private:
  std::vector<cplx> prev_, curr_, next_, acc_;
};

SpinorField propagate_step(const ChebyshevPlan& plan, const HamiltonianOperator& h, const SpinorField& field);

enum class IntervalSource { Lattice, Paper };

struct PropagationOptions {
  IntervalSource interval_source = IntervalSource::Lattice;
  double margin = kSpectralMargin;
  std::optional<double> dt;      // upper bound on the step; default derives from max_a
  double max_a = 1000.0;         // per-step scaled half-bandwidth under Auto/Fixed
  bool keep_fields = false;      // store full spinors, not only densities
  double boundary_tolerance = 1e-4;
  std::size_t boundary_nodes = kBoundaryNodes;
  WarningSink warn;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> densities;
  std::vector<SpinorField> fields;  // empty unless keep_fields
  ChebyshevPlan plan;
  std::size_t steps = 0;
};

SpectralInterval propagation_interval(const HamiltonianOperator& h, const PropagationOptions& options);

/// Evolves to t_total, recording t = 0 and n_snapshots evenly spaced times in (0, t_total].
/// Throws BoundaryLeak when a snapshot carries more than boundary_tolerance
/// probability on the boundary_nodes outermost nodes at either end.
Trajectory propagate(const OrderPolicy& policy, const HamiltonianOperator& h, const SpinorField& field,
                     double t_total, std::size_t n_snapshots, const PropagationOptions& options = {});

}  // namespace dirac
