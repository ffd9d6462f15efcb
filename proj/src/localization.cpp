#include "dirac/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "dirac/csv.hpp"
#include "dirac/error.hpp"

namespace dirac {

namespace {

// Natural cubic spline through (x_min + j h, y_j).
class UniformSpline {
 public:
  UniformSpline(double x0, double h, std::vector<double> y) : x0_(x0), h_(h), y_(std::move(y)), m_(y_.size(), 0.0) {
    const std::size_t n = y_.size();
    if (n < 3) return;
    // second derivatives m_1..m_{n-2}: m_{j-1} + 4 m_j + m_{j+1} = 6 (y_{j+1} - 2 y_j + y_{j-1}) / h^2
    const std::size_t k = n - 2;
    std::vector<double> cp(k), rhs(k);
    for (std::size_t i = 0; i < k; ++i) rhs[i] = 6.0 * (y_[i + 2] - 2.0 * y_[i + 1] + y_[i]) / (h_ * h_);
    double denom = 4.0;
    cp[0] = 1.0 / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < k; ++i) {
      denom = 4.0 - cp[i - 1];
      cp[i] = 1.0 / denom;
      rhs[i] = (rhs[i] - rhs[i - 1]) / denom;
    }
    for (std::size_t i = k - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
    for (std::size_t i = 0; i < k; ++i) m_[i + 1] = rhs[i];
  }

  /// Zero outside the tabulated range.
  double operator()(double x) const {
    const double u = (x - x0_) / h_;
    const auto last = static_cast<double>(y_.size() - 1);
    if (u < 0.0 || u > last) return 0.0;
    auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= y_.size() - 1) i = y_.size() - 2;
    const double b = u - static_cast<double>(i);
    const double a = 1.0 - b;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h_ * h_ / 6.0;
  }

 private:
  double x0_;
  double h_;
  std::vector<double> y_;
  std::vector<double> m_;
};

double discrete_mass(std::span<const double> p, double dx) {
  double s = 0.0;
  for (double v : p) s += v;
  return s * dx;
}

}  // namespace

DensityProfile DensityProfile::from_density(const Grid1D& grid, std::vector<double> p, bool renormalize) {
  if (p.size() != grid.size()) throw Error(ErrorKind::LengthMismatch, "density does not match the grid");
  for (double v : p)
    if (!(v >= 0.0)) throw Error(ErrorKind::InvalidSpec, "density must be non-negative");
  const double mass = discrete_mass(p, grid.dx());
  if (renormalize) {
    if (!(mass > 0.0)) throw Error(ErrorKind::UnnormalizedInput, "density has zero total probability");
    for (double& v : p) v /= mass;
    return {grid, std::move(p), true};
  }
  const bool normalized = std::abs(mass - 1.0) <= kNormalizationTolerance;
  return {grid, std::move(p), normalized};
}

double universal_constant() {
  return -0.25 + 0.5 * std::erf(1.0) + std::exp(-1.0) / std::sqrt(std::numbers::pi);
}

double localization_functional(const DensityProfile& profile) {
  const auto& p = profile.p;
  const double dx = profile.grid.dx();
  if (p.size() != profile.grid.size()) throw Error(ErrorKind::LengthMismatch, "density does not match the grid");
  const double mass = discrete_mass(p, dx);
  if (!profile.normalized || std::abs(mass - 1.0) > kNormalizationTolerance)
    throw Error(ErrorKind::UnnormalizedInput, "density integrates to " + std::to_string(mass));

  std::vector<double> q(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) q[j] = std::sqrt(std::max(p[j], 0.0));
  double sum = 0.0;
  for (std::size_t j = 1; j + 1 < p.size(); ++j) {
    if (p[j] < kDensityFloor) continue;
    sum += std::abs(q[j] * (q[j + 1] - 2.0 * q[j] + q[j - 1]));
  }
  return sum / dx;
}

double localization_width(const DensityProfile& profile) {
  const double l = localization_functional(profile);
  if (!(l > 0.0)) throw Error(ErrorKind::ZeroFunctional, "localization functional vanishes (flat density)");
  return std::sqrt(universal_constant() / l);
}

DensityProfile rescale_density(const DensityProfile& profile, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::InvalidSpec, "scale must be positive");
  const auto& grid = profile.grid;
  const double dx = grid.dx();

  // probability whose image x * scale falls off the grid
  double lost = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double y = grid.x(j) * scale;
    if (y < grid.x_min() || y > grid.x_max()) lost += profile.p[j];
  }
  if (lost * dx > kConstructionBoundaryTolerance)
    throw Error(ErrorKind::SupportOverflow, "rescaled density leaves the grid (lost " + std::to_string(lost * dx) + ")");

  std::vector<double> root(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) root[j] = std::sqrt(std::max(profile.p[j], 0.0));
  const UniformSpline spline(grid.x_min(), dx, std::move(root));

  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = std::max(spline(grid.x(j) / scale), 0.0);
    out[j] = r * r / scale;
  }
  return DensityProfile::from_density(grid, std::move(out), true);
}

void write_width_series_csv(std::ostream& out, std::span<const double> times, std::span<const double> widths) {
  if (times.size() != widths.size()) throw Error(ErrorKind::LengthMismatch, "times and widths differ in length");
  out << "t,W\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double row[] = {times[i], widths[i]};
    write_csv_row(out, row);
  }
}

}  // namespace dirac
