#include "dirac/disorder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <ostream>
#include <thread>

#include "dirac/csv.hpp"
#include "dirac/error.hpp"
#include "dirac/localization.hpp"

namespace dirac {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double population_std(std::span<const double> values, double mean) {
  std::vector<double> dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) dev[i] = (values[i] - mean) * (values[i] - mean);
  return std::sqrt(pairwise_sum(dev) / static_cast<double>(values.size()));
}

}  // namespace

const char* to_string(DisorderKind kind) noexcept { return kind == DisorderKind::Potential ? "potential" : "mass"; }

DisorderKind parse_disorder_kind(const std::string& text) {
  if (text == "potential") return DisorderKind::Potential;
  if (text == "mass") return DisorderKind::Mass;
  throw Error(ErrorKind::Config, "disorder kind must be 'potential' or 'mass', got '" + text + "'");
}

void DisorderSpec::validate() const {
  if (!(strength >= 0.0) || !std::isfinite(strength)) throw Error(ErrorKind::InvalidSpec, "disorder strength must be >= 0");
  if (!std::isfinite(mean_mass) || !std::isfinite(mean_potential))
    throw Error(ErrorKind::InvalidSpec, "non-finite disorder mean");
}

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t sample_index) noexcept {
  return splitmix64(master_seed ^ splitmix64((sample_index + 1) * kGolden));
}

double uniform_draw(std::uint64_t key, std::uint64_t counter) noexcept {
  const std::uint64_t bits = splitmix64(key + (counter + 1) * kGolden);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

DisorderSample sample_disorder(const DisorderSpec& spec, const Grid1D& grid, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = grid.size();
  DisorderSample out{std::vector<double>(n, spec.mean_potential), std::vector<double>(n, spec.mean_mass)};
  if (spec.strength == 0.0) return out;
  auto& target = spec.kind == DisorderKind::Potential ? out.potential : out.mass;
  const double center = spec.kind == DisorderKind::Potential ? spec.mean_potential : spec.mean_mass;
  for (std::size_t j = 0; j < n; ++j) target[j] = center + spec.strength * (2.0 * uniform_draw(seed, j) - 1.0);
  return out;
}

std::vector<double> Schedule::times() const {
  std::vector<double> t(n_intervals + 1);
  for (std::size_t i = 0; i <= n_intervals; ++i)
    t[i] = t_end * static_cast<double>(i) / static_cast<double>(n_intervals);
  return t;
}

std::vector<double> run_sample(const DisorderSpec& spec, const EnsembleSetup& setup, std::uint64_t seed) {
  auto field = make_gaussian_spinor(setup.grid, setup.initial);
  auto disorder = sample_disorder(spec, setup.grid, seed);
  const HamiltonianOperator h(setup.grid, std::move(disorder.potential), std::move(disorder.mass));
  const auto traj = propagate(setup.policy, h, field, setup.schedule.t_end, setup.schedule.n_intervals, setup.propagation);
  std::vector<double> widths;
  widths.reserve(traj.densities.size());
  for (const auto& p : traj.densities) widths.push_back(localization_width(DensityProfile::from_density(setup.grid, p)));
  return widths;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EnsembleResult run_ensemble(const DisorderSpec& spec, std::size_t n_samples, const EnsembleSetup& setup,
                            std::uint64_t master_seed) {
  spec.validate();
  if (n_samples == 0) throw Error(ErrorKind::InvalidSpec, "n_samples must be >= 1");

  std::vector<std::vector<double>> widths(n_samples);
  std::vector<std::optional<Error>> failures(n_samples);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_samples; i = next++) {
      if (stop) return;
      try {
        widths[i] = run_sample(spec, setup, sample_seed(master_seed, i));
      } catch (const Error& e) {
        failures[i] = e;
        if (setup.failure == FailurePolicy::Abort) stop = true;
      }
    }
  };
  std::size_t threads = setup.threads ? setup.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n_samples);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<std::size_t> ok;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (failures[i]) {
      if (setup.failure == FailurePolicy::Abort) throw *failures[i];
      ++failed;
    } else if (!widths[i].empty()) {
      ok.push_back(i);
    }
  }
  if (static_cast<double>(failed) > setup.max_failure_fraction * static_cast<double>(n_samples) || ok.empty())
    throw Error(ErrorKind::SampleFailures,
                std::to_string(failed) + " of " + std::to_string(n_samples) + " samples failed");

  EnsembleResult result;
  result.spec = spec;
  result.times = setup.schedule.times();
  result.n_samples = ok.size();
  result.n_failed = failed;
  result.master_seed = master_seed;
  const std::size_t nt = result.times.size();
  result.w_mean.resize(nt);
  result.w_std.resize(nt);
  result.w_sem.resize(nt);
  std::vector<double> column(ok.size());
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t s = 0; s < ok.size(); ++s) column[s] = widths[ok[s]][t];
    const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
    if (*lo == *hi) {
      result.w_mean[t] = *lo;
      result.w_std[t] = 0.0;
    } else {
      result.w_mean[t] = pairwise_sum(column) / static_cast<double>(column.size());
      result.w_std[t] = population_std(column, result.w_mean[t]);
    }
    result.w_sem[t] = result.w_std[t] / std::sqrt(static_cast<double>(column.size()));
  }
  return result;
}

std::vector<double> default_strengths(DisorderKind kind) {
  if (kind == DisorderKind::Potential) return {0, 1, 2, 4, 6, 8, 10, 12};
  return {0, 1, 2, 3, 4, 5, 7, 9, 11};
}

SweepResult sweep_strengths(DisorderKind kind, std::span<const double> strengths, std::size_t n_samples,
                            const EnsembleSetup& setup, std::uint64_t master_seed, double mean_mass,
                            double mean_potential) {
  if (strengths.empty()) throw Error(ErrorKind::InvalidSpec, "no strengths given");
  for (std::size_t i = 0; i < strengths.size(); ++i) {
    if (!(strengths[i] >= 0.0)) throw Error(ErrorKind::InvalidSpec, "strengths must be non-negative");
    if (i > 0 && !(strengths[i] > strengths[i - 1])) throw Error(ErrorKind::InvalidSpec, "strengths must be ascending");
  }
  SweepResult sweep;
  sweep.kind = kind;
  sweep.t_star = setup.schedule.t_end;
  sweep.master_seed = master_seed;
  for (double s : strengths) {
    const DisorderSpec spec{kind, s, mean_mass, mean_potential};
    auto ensemble = run_ensemble(spec, n_samples, setup, master_seed);
    sweep.points.push_back({s, ensemble.w_mean.back(), ensemble.w_std.back(), ensemble.w_sem.back(), ensemble.n_samples});
    sweep.ensembles.push_back(std::move(ensemble));
  }
  return sweep;
}

std::size_t dominant_frequency_bin(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) throw Error(ErrorKind::InvalidSpec, "series too short for a spectrum");
  // remove the least-squares line so the trend does not dominate the low bins
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += series[i];
    sxx += x * x;
    sxy += x * series[i];
  }
  const double nn = static_cast<double>(n);
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const double icept = (sy - slope * sx) / nn;
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = series[i] - (icept + slope * static_cast<double>(i));

  std::size_t best = 1;
  double best_power = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc{};
    for (std::size_t i = 0; i < n; ++i)
      acc += r[i] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i % n) / nn);
    if (std::norm(acc) > best_power) {
      best_power = std::norm(acc);
      best = k;
    }
  }
  return best;
}

void write_ensemble_width_csv(std::ostream& out, const EnsembleResult& result) {
  out << "t,W_mean,W_std,n_samples\n";
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    const double row[] = {result.times[i], result.w_mean[i], result.w_std[i], static_cast<double>(result.n_samples)};
    write_csv_row(out, row);
  }
}

void write_ensemble_spread_csv(std::ostream& out, const EnsembleResult& result) {
  out << "t,W_std,W_sem,n_samples\n";
  for (std::size_t i = 0; i < result.times.size(); ++i) {
    const double row[] = {result.times[i], result.w_std[i], result.w_sem[i], static_cast<double>(result.n_samples)};
    write_csv_row(out, row);
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const Grid1D& grid) {
  out << "s,t_star,W_mean,W_std,n_samples,master_seed,d_x,n_points,W_sem\n";
  for (const auto& p : sweep.points) {
    out << format_number(p.strength) << ',' << format_number(sweep.t_star) << ',' << format_number(p.w_mean) << ','
        << format_number(p.w_std) << ',' << p.n_samples << ',' << sweep.master_seed << ',' << format_number(grid.dx())
        << ',' << grid.size() << ',' << format_number(p.w_sem) << '\n';
  }
}

}  // namespace dirac
