#include "dirac/grid.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "dirac/csv.hpp"
#include "dirac/error.hpp"

namespace dirac {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), dx_(0.0) {
  if (n_points < kMinPoints)
    throw Error(ErrorKind::InvalidGrid, "grid needs at least 8 points, got " + std::to_string(n_points));
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw Error(ErrorKind::InvalidGrid, "grid requires finite x_min < x_max");
  dx_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

std::vector<double> Grid1D::coordinates() const {
  std::vector<double> xs(n_);
  for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
  return xs;
}

SpinorField::SpinorField(const Grid1D& g, std::vector<cplx> up, std::vector<cplx> lo)
    : grid(g), upper(std::move(up)), lower(std::move(lo)) {
  if (upper.size() != g.size() || lower.size() != g.size())
    throw Error(ErrorKind::LengthMismatch, "spinor components must match the grid size");
}

void GaussianSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorKind::InvalidSpec, "sigma must be positive");
  const double amp = std::norm(sigma0) + std::norm(chi0);
  if (std::abs(amp - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidSpec, "|Sigma0|^2 + |X0|^2 must equal 1");
  if (!std::isfinite(k1) || !std::isfinite(k2) || !std::isfinite(x_center))
    throw Error(ErrorKind::InvalidSpec, "non-finite packet parameter");
}

double gaussian_normalization(double sigma) {
  return std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
}

SpinorField make_gaussian_spinor(const Grid1D& grid, const GaussianSpec& spec) {
  spec.validate();
  if (spec.x_center - 6.0 * spec.sigma < grid.x_min() || spec.x_center + 6.0 * spec.sigma > grid.x_max())
    throw Error(ErrorKind::PacketTooWideForGrid, "6 sigma support leaves the grid");

  const double ng = gaussian_normalization(spec.sigma);
  SpinorField field(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    const double u = x - spec.x_center;
    const double env = ng * std::exp(-u * u / (4.0 * spec.sigma * spec.sigma));
    field.upper[j] = spec.sigma0 * std::polar(env, spec.k1 * x);
    field.lower[j] = spec.chi0 * std::polar(env, spec.k2 * x);
  }

  const double norm = norm_squared(field);
  const double scale = 1.0 / std::sqrt(norm);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    field.upper[j] *= scale;
    field.lower[j] *= scale;
  }

  const auto density = probability_density(field);
  if (boundary_probability(density, grid.dx()) >= kConstructionBoundaryTolerance)
    throw Error(ErrorKind::PacketTooWideForGrid, "packet has non-negligible probability at the boundary");
  return field;
}

std::vector<double> probability_density(const SpinorField& field) {
  std::vector<double> p(field.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::norm(field.upper[j]) + std::norm(field.lower[j]);
  return p;
}

double norm_squared(const SpinorField& field) {
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) sum += std::norm(field.upper[j]) + std::norm(field.lower[j]);
  return sum * field.grid.dx();
}

double expectation_position(const SpinorField& field) {
  const double norm = norm_squared(field);
  if (std::abs(norm - 1.0) > 1e-6)
    throw Error(ErrorKind::FieldNotNormalized, "norm deviates from 1 by " + std::to_string(norm - 1.0));
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j)
    sum += field.grid.x(j) * (std::norm(field.upper[j]) + std::norm(field.lower[j]));
  return sum * field.grid.dx();
}

double boundary_probability(std::span<const double> density, double dx, std::size_t nodes) {
  const std::size_t n = density.size();
  nodes = std::min(nodes, n / 2);
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) sum += density[j] + density[n - 1 - j];
  return sum * dx;
}

double relative_l2_distance(const SpinorField& a, const SpinorField& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "fields differ in size");
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    diff += std::norm(a.upper[j] - b.upper[j]) + std::norm(a.lower[j] - b.lower[j]);
    ref += std::norm(b.upper[j]) + std::norm(b.lower[j]);
  }
  return std::sqrt(diff / ref);
}

double relative_l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "arrays differ in size");
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    diff += (a[j] - b[j]) * (a[j] - b[j]);
    ref += b[j] * b[j];
  }
  return std::sqrt(diff / ref);
}

void write_spinor_csv(std::ostream& out, const SpinorField& field) {
  out << "x,re_upper,im_upper,re_lower,im_lower,density\n";
  for (std::size_t j = 0; j < field.size(); ++j) {
    const double row[] = {field.grid.x(j),
                          field.upper[j].real(),
                          field.upper[j].imag(),
                          field.lower[j].real(),
                          field.lower[j].imag(),
                          std::norm(field.upper[j]) + std::norm(field.lower[j])};
    write_csv_row(out, row);
  }
}

}  // namespace dirac
