#include "dirac/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dirac/error.hpp"

namespace dirac {

namespace {

constexpr double kRescaleThreshold = 1e250;
constexpr int kMaxOrder = 1'000'000;
constexpr double kMaxArgument = 1e7;
constexpr double kNormGrowthLimit = 1e-3;
constexpr double kSeriesArgument = 1e-3;

void check_bessel_args(int k, double a) {
  if (k < 0) throw Error(ErrorKind::InvalidSpec, "Bessel order must be non-negative");
  if (!std::isfinite(a) || a < 0.0) throw Error(ErrorKind::InvalidSpec, "Bessel argument must be finite and >= 0");
  if (k > kMaxOrder || a > kMaxArgument)
    throw Error(ErrorKind::OverflowGuard, "Bessel order/argument beyond supported range (k <= 1e6, a <= 1e7)");
}

std::vector<cplx> flatten(const SpinorField& field) {
  std::vector<cplx> flat(2 * field.size());
  std::copy(field.upper.begin(), field.upper.end(), flat.begin());
  std::copy(field.lower.begin(), field.lower.end(), flat.begin() + static_cast<std::ptrdiff_t>(field.size()));
  return flat;
}

SpinorField unflatten(const Grid1D& grid, const std::vector<cplx>& flat) {
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  return SpinorField(grid, std::vector<cplx>(flat.begin(), flat.begin() + n), std::vector<cplx>(flat.begin() + n, flat.end()));
}

double flat_norm2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

std::vector<double> flat_density(const std::vector<cplx>& v) {
  const std::size_t n = v.size() / 2;
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) p[j] = std::norm(v[j]) + std::norm(v[n + j]);
  return p;
}

std::size_t steps_for(double span, double limit) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / limit * (1.0 - 1e-12))));
}

}  // namespace

std::vector<double> bessel_table(int kmax, double a) {
  check_bessel_args(kmax, a);
  std::vector<double> j(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (a == 0.0) {
    j[0] = 1.0;
    return j;
  }
  if (a < kSeriesArgument) {
    // ascending series; the downward recurrence overflows for tiny a
    const double h2 = 0.25 * a * a;
    double lead = 1.0;  // (a/2)^k / k!
    for (int k = 0; k <= kmax; ++k) {
      if (k > 0) lead *= 0.5 * a / k;
      double term = lead, sum = lead;
      for (int n = 1; n < 6 && term != 0.0; ++n) {
        term *= -h2 / (n * static_cast<double>(n + k));
        sum += term;
      }
      j[static_cast<std::size_t>(k)] = sum;
    }
    return j;
  }
  const int top = std::max(kmax, static_cast<int>(std::ceil(a)));
  int start = top + 20 + static_cast<int>(std::ceil(std::sqrt(40.0 * top)));
  start += start % 2;

  double above = 0.0;  // J_{k+1}
  double here = 1.0;   // J_k, arbitrary seed at k = start
  double sum = 0.0;    // J_0 + 2 sum J_{2m}, unnormalized
  if (start <= kmax) j[static_cast<std::size_t>(start)] = here;
  sum += 2.0 * here;   // start is even and > 0
  for (int k = start; k > 0; --k) {
    const double below = (2.0 * k / a) * here - above;
    above = here;
    here = below;
    const int idx = k - 1;
    if (std::abs(here) > kRescaleThreshold) {
      const double f = 1.0 / kRescaleThreshold;
      here *= f;
      above *= f;
      sum *= f;
      for (auto& v : j) v *= f;
    }
    if (idx <= kmax) j[static_cast<std::size_t>(idx)] = here;
    if (idx % 2 == 0) sum += (idx == 0 ? 1.0 : 2.0) * here;
  }
  for (auto& v : j) v /= sum;
  return j;
}

double bessel_j(int k, double a) { return bessel_table(k, a)[static_cast<std::size_t>(k)]; }

std::vector<cplx> chebyshev_coefficients(double a, std::size_t order) {
  const auto jk = bessel_table(static_cast<int>(order), a);
  std::vector<cplx> coeffs(order + 1);
  static const cplx kPowers[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
  for (std::size_t k = 0; k <= order; ++k) coeffs[k] = (k == 0 ? 1.0 : 2.0) * kPowers[k % 4] * jk[k];
  return coeffs;
}

std::size_t auto_order(double a, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidSpec, "order tolerance must be positive");
  if (a == 0.0) return 0;
  int kmax = static_cast<int>(std::ceil(a + 10.0 * std::cbrt(a))) + 40;
  while (true) {
    const auto jk = bessel_table(kmax, a);
    for (int k = 0; k + 2 <= kmax; ++k) {
      if (std::abs(jk[static_cast<std::size_t>(k + 1)]) + std::abs(jk[static_cast<std::size_t>(k + 2)]) < tol)
        return static_cast<std::size_t>(k);
    }
    kmax *= 2;
  }
}

ChebyshevPlan make_plan(const SpectralInterval& interval, double dt, const OrderPolicy& policy, const WarningSink& warn) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidSpec, "dt must be positive");
  if (!(interval.e_max > interval.e_min)) throw Error(ErrorKind::InvalidSpec, "spectral interval requires e_min < e_max");
  ChebyshevPlan plan;
  plan.interval = interval;
  plan.dt = dt;
  plan.a = dt * interval.half_width();
  switch (policy.kind) {
    case OrderPolicy::Kind::Auto:
      plan.order = auto_order(plan.a, policy.tolerance);
      break;
    case OrderPolicy::Kind::Fixed:
      plan.order = policy.order;
      if (static_cast<double>(plan.order) < plan.a && warn)
        warn("order-too-small: fixed order " + std::to_string(plan.order) + " below a = " + std::to_string(plan.a));
      break;
    case OrderPolicy::Kind::Paper:
      plan.order = 2;
      if (plan.a > kPaperMaxA && warn) warn("paper mode step has a = " + std::to_string(plan.a) + " > 0.05");
      break;
  }
  plan.coeffs = chebyshev_coefficients(plan.a, plan.order);
  plan.global_phase = std::polar(1.0, -dt * interval.center());
  return plan;
}

SpinorField apply_scaled(const HamiltonianOperator& h, const SpectralInterval& interval, const SpinorField& field) {
  const auto in = flatten(field);
  std::vector<cplx> out(in.size());
  h.apply(in, out, interval.center(), 1.0 / interval.half_width());
  return unflatten(field.grid, out);
}

ChebyshevWorkspace::ChebyshevWorkspace(std::size_t n_points)
    : prev_(2 * n_points), curr_(2 * n_points), next_(2 * n_points), acc_(2 * n_points) {}

void ChebyshevWorkspace::step(const ChebyshevPlan& plan, const HamiltonianOperator& h, std::vector<cplx>& state) {
  const std::size_t len = state.size();
  if (len != 2 * h.size()) throw Error(ErrorKind::LengthMismatch, "state does not match the Hamiltonian");
  prev_.resize(len);
  curr_.resize(len);
  next_.resize(len);
  acc_.resize(len);

  const double input_norm2 = flat_norm2(state);
  const double c = plan.interval.center();
  const double inv_hw = 1.0 / plan.interval.half_width();
  const auto& coeffs = plan.coeffs;

  for (std::size_t i = 0; i < len; ++i) acc_[i] = coeffs[0] * state[i];
  if (plan.order >= 1) {
    std::copy(state.begin(), state.end(), prev_.begin());
    h.apply(prev_, curr_, c, inv_hw);
    for (std::size_t i = 0; i < len; ++i) acc_[i] += coeffs[1] * curr_[i];
    for (std::size_t k = 2; k <= plan.order; ++k) {
      h.apply(curr_, next_, c, 2.0 * inv_hw);
      const cplx ak = coeffs[k];
      for (std::size_t i = 0; i < len; ++i) {
        next_[i] -= prev_[i];
        acc_[i] += ak * next_[i];
      }
      std::swap(prev_, curr_);
      std::swap(curr_, next_);
    }
  }
  for (std::size_t i = 0; i < len; ++i) state[i] = plan.global_phase * acc_[i];

  const double output_norm2 = flat_norm2(state);
  const double limit = (1.0 + kNormGrowthLimit) * (1.0 + kNormGrowthLimit) * input_norm2;
  if (!std::isfinite(output_norm2) || output_norm2 > limit)
    throw Error(ErrorKind::NormBlowup, "norm grew from " + std::to_string(std::sqrt(input_norm2)) + " to " +
                                           std::to_string(std::sqrt(output_norm2)) +
                                           "; the spectral interval does not enclose H");
}

SpinorField propagate_step(const ChebyshevPlan& plan, const HamiltonianOperator& h, const SpinorField& field) {
  if (field.size() != h.size()) throw Error(ErrorKind::LengthMismatch, "field does not match the Hamiltonian");
  auto state = flatten(field);
  ChebyshevWorkspace ws(h.size());
  ws.step(plan, h, state);
  return unflatten(field.grid, state);
}

SpectralInterval propagation_interval(const HamiltonianOperator& h, const PropagationOptions& options) {
  const auto base = options.interval_source == IntervalSource::Lattice ? lattice_spectral_bounds(h)
                                                                       : paper_spectral_bounds(h);
  return with_margin(base, options.margin);
}

Trajectory propagate(const OrderPolicy& policy, const HamiltonianOperator& h, const SpinorField& field,
                     double t_total, std::size_t n_snapshots, const PropagationOptions& options) {
  if (field.size() != h.size()) throw Error(ErrorKind::LengthMismatch, "field does not match the Hamiltonian");
  if (!(t_total >= 0.0) || !std::isfinite(t_total)) throw Error(ErrorKind::InvalidSpec, "t_total must be >= 0");
  if (t_total > 0.0 && n_snapshots == 0) throw Error(ErrorKind::InvalidSpec, "n_snapshots must be >= 1");
  if (options.dt && !(*options.dt > 0.0)) throw Error(ErrorKind::InvalidSpec, "dt must be positive");
  if (!(options.max_a > 0.0)) throw Error(ErrorKind::InvalidSpec, "max_a must be positive");

  const double dx = h.grid().dx();
  Trajectory traj;
  auto state = flatten(field);

  auto record = [&](double t) {
    auto density = flat_density(state);
    const double leak = boundary_probability(density, dx, options.boundary_nodes);
    if (leak > options.boundary_tolerance)
      throw Error(ErrorKind::BoundaryLeak,
                  "boundary probability " + std::to_string(leak) + " at t = " + std::to_string(t));
    traj.times.push_back(t);
    traj.densities.push_back(std::move(density));
    if (options.keep_fields) traj.fields.push_back(unflatten(h.grid(), state));
  };

  if (t_total == 0.0) {
    record(0.0);
    return traj;
  }

  const auto interval = propagation_interval(h, options);
  const double span = t_total / static_cast<double>(n_snapshots);
  std::size_t steps = options.dt ? steps_for(span, *options.dt) : steps_for(span * interval.half_width(), options.max_a);
  if (policy.kind == OrderPolicy::Kind::Paper)
    steps = std::max(steps, steps_for(span * interval.half_width(), kPaperMaxA));
  traj.plan = make_plan(interval, span / static_cast<double>(steps), policy, options.warn);

  ChebyshevWorkspace ws(h.size());
  record(0.0);
  for (std::size_t s = 1; s <= n_snapshots; ++s) {
    for (std::size_t i = 0; i < steps; ++i) ws.step(traj.plan, h, state);
    traj.steps += steps;
    record(t_total * static_cast<double>(s) / static_cast<double>(n_snapshots));
  }
  return traj;
}

}  // namespace dirac
