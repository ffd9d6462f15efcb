#include "dirac/powerlaw_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "dirac/csv.hpp"
#include "dirac/disorder.hpp"
#include "dirac/error.hpp"

namespace dirac {

namespace {

constexpr double kLambdaCeiling = 1e12;

struct Problem {
  std::span<const double> s;
  std::span<const double> w;
  std::span<const double> weights;

  bool admissible(const Eigen::Vector3d& p) const {
    if (!(p[2] > 0.0) || !p.allFinite()) return false;
    for (double si : s)
      if (!(p[0] * si + p[1] > 0.0)) return false;
    return true;
  }

  double sse(const Eigen::Vector3d& p) const {
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double r = w[i] - power_law(s[i], p[0], p[1], p[2]);
      total += weights[i] * r * r;
    }
    return total;
  }
};

struct Attempt {
  Eigen::Vector3d params;
  double sse = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

std::optional<Attempt> levenberg_marquardt(const Problem& prob, Eigen::Vector3d p, const FitOptions& opt) {
  if (!prob.admissible(p)) return std::nullopt;
  double lambda = opt.lambda0;
  double current = prob.sse(p);
  Attempt out{p, current, false, 0};
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    out.iterations = it;
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < prob.s.size(); ++i) {
      const auto g = power_law_gradient(prob.s[i], p[0], p[1], p[2]);
      const Eigen::Vector3d gi(g[0], g[1], g[2]);
      const double r = prob.w[i] - power_law(prob.s[i], p[0], p[1], p[2]);
      jtj += prob.weights[i] * gi * gi.transpose();
      jtr += prob.weights[i] * r * gi;
    }
    if (current == 0.0 || jtr.norm() == 0.0) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    while (lambda <= kLambdaCeiling) {
      Eigen::Matrix3d lhs = jtj;
      lhs.diagonal() += lambda * jtj.diagonal().cwiseMax(std::numeric_limits<double>::min());
      const Eigen::Vector3d step = lhs.ldlt().solve(jtr);
      const Eigen::Vector3d trial = p + step;
      const double trial_sse = prob.admissible(trial) ? prob.sse(trial) : std::numeric_limits<double>::infinity();
      if (step.allFinite() && trial_sse <= current) {
        const double rel = step.norm() / std::max(p.norm(), std::numeric_limits<double>::min());
        p = trial;
        current = trial_sse;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel < opt.step_tolerance) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // no descent left at working precision: p is stationary
      out.converged = true;
      break;
    }
    if (out.converged) break;
  }
  out.params = p;
  out.sse = current;
  return out;
}

}  // namespace

double power_law(double s, double a, double b, double nu) { return std::pow(a * s + b, -nu); }

std::array<double, 3> power_law_gradient(double s, double a, double b, double nu) {
  const double u = a * s + b;
  const double f = std::pow(u, -nu);
  const double d = -nu * f / u;
  return {d * s, d, -std::log(u) * f};
}

FitResult fit_power_law(std::span<const double> s, std::span<const double> w, std::span<const double> weights,
                        const FitOptions& options) {
  if (s.size() != w.size() || s.size() != weights.size())
    throw Error(ErrorKind::LengthMismatch, "s, w and weights must have equal length");
  std::size_t positive = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i]) || !std::isfinite(s[i]))
      throw Error(ErrorKind::DegenerateData, "widths must be positive and finite");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw Error(ErrorKind::DegenerateData, "weights must be non-negative");
    if (weights[i] > 0.0) ++positive;
  }
  if (s.size() < 4 || positive < 4) throw Error(ErrorKind::DegenerateData, "need at least 4 positively weighted points");
  if (std::all_of(w.begin(), w.end(), [&](double v) { return v == w[0]; }))
    throw Error(ErrorKind::DegenerateData, "constant widths admit only nu = 0");

  const auto [imin, imax] = std::minmax_element(s.begin(), s.end());
  const auto i0 = static_cast<std::size_t>(imin - s.begin());
  const auto i1 = static_cast<std::size_t>(imax - s.begin());
  if (s[i0] == s[i1]) throw Error(ErrorKind::DegenerateData, "all points share one strength");

  const Problem prob{s, w, weights};
  std::optional<Attempt> best;
  for (double nu0 : options.nu_starts) {
    const double y0 = std::pow(w[i0], -1.0 / nu0);
    const double y1 = std::pow(w[i1], -1.0 / nu0);
    const double a = (y1 - y0) / (s[i1] - s[i0]);
    const double b = y0 - a * s[i0];
    auto attempt = levenberg_marquardt(prob, Eigen::Vector3d(a, b, nu0), options);
    if (!attempt || !attempt->converged) continue;
    if (!best) {
      best = attempt;
      continue;
    }
    const double scale = std::max(best->sse, attempt->sse);
    const bool tie = std::abs(best->sse - attempt->sse) <= 1e-12 * scale;
    if ((!tie && attempt->sse < best->sse) || (tie && attempt->params[2] < best->params[2])) best = attempt;
  }
  if (!best) throw Error(ErrorKind::NonConvergence, "no start converged");

  FitResult fit;
  fit.a = best->params[0];
  fit.b = best->params[1];
  fit.nu = best->params[2];
  fit.sse = best->sse;
  fit.converged = true;
  fit.iterations = best->iterations;
  std::vector<double> model(s.size());
  fit.residuals.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    model[i] = power_law(s[i], fit.a, fit.b, fit.nu);
    fit.residuals[i] = w[i] - model[i];
  }
  fit.r_squared = r_squared(w, model, weights);
  return fit;
}

double r_squared(std::span<const double> w, std::span<const double> w_fit, std::span<const double> weights) {
  if (w.size() != w_fit.size() || w.size() != weights.size())
    throw Error(ErrorKind::LengthMismatch, "arrays must have equal length");
  double sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += weights[i];
    swy += weights[i] * w[i];
  }
  if (!(sw > 0.0)) throw Error(ErrorKind::ZeroVariance, "weights sum to zero");
  const double mean = swy / sw;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    ss_res += weights[i] * (w[i] - w_fit[i]) * (w[i] - w_fit[i]);
    ss_tot += weights[i] * (w[i] - mean) * (w[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw Error(ErrorKind::ZeroVariance, "data have zero weighted variance");
  return 1.0 - ss_res / ss_tot;
}

std::vector<double> weights_from_spread(std::span<const double> sigma) {
  std::vector<double> weights(sigma.size(), 0.0);
  double max_finite = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > 0.0) {
      weights[i] = 1.0 / (sigma[i] * sigma[i]);
      max_finite = std::max(max_finite, weights[i]);
    }
  }
  const double cap = max_finite > 0.0 ? 10.0 * max_finite : 1.0;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (!(sigma[i] > 0.0)) weights[i] = cap;
  return weights;
}

std::vector<double> weights_from_sweep(std::span<const SweepPoint> points, SpreadMeasure measure) {
  std::vector<double> sigma;
  sigma.reserve(points.size());
  for (const auto& p : points) sigma.push_back(measure == SpreadMeasure::StandardError ? p.w_sem : p.w_std);
  return weights_from_spread(sigma);
}

void write_fit_csv(std::ostream& out, const FitResult& fit, std::span<const double> s, std::span<const double> w,
                   std::span<const double> weights) {
  out << "# a = " << format_number(fit.a) << '\n'
      << "# b = " << format_number(fit.b) << '\n'
      << "# nu = " << format_number(fit.nu) << '\n'
      << "# r_squared = " << format_number(fit.r_squared) << '\n'
      << "s,W,W_fit,residual,weight\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double row[] = {s[i], w[i], w[i] - fit.residuals[i], fit.residuals[i], weights[i]};
    write_csv_row(out, row);
  }
}

}  // namespace dirac
