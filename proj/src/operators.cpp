#include "dirac/operators.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "dirac/csv.hpp"
#include "dirac/error.hpp"

namespace dirac {

DerivativeOperator::DerivativeOperator(std::size_t n_points, double dx)
    : n_(n_points), dx_(dx), c_prime_(n_points), inv_diag_(n_points) {
  if (n_points < 2) throw Error(ErrorKind::InvalidGrid, "derivative needs at least 2 points");
  if (!(dx > 0.0)) throw Error(ErrorKind::InvalidGrid, "d_x must be positive");
  // LU of tridiag(1, 2, 1); pivots are (j+2)/(j+1) >= 1
  double pivot = 2.0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (j > 0) pivot = 2.0 - c_prime_[j - 1];
    assert(pivot > 0.5);
    inv_diag_[j] = 1.0 / pivot;
    c_prime_[j] = inv_diag_[j];
  }
}

void DerivativeOperator::solve_averaging(std::span<cplx> r) const {
  r[0] *= inv_diag_[0];
  for (std::size_t j = 1; j < n_; ++j) r[j] = (r[j] - r[j - 1]) * inv_diag_[j];
  for (std::size_t j = n_ - 1; j-- > 0;) r[j] -= c_prime_[j] * r[j + 1];
}

void DerivativeOperator::apply(std::span<const cplx> y, std::span<cplx> out) const {
  if (y.size() != n_ || out.size() != n_) throw Error(ErrorKind::LengthMismatch, "derivative input size");
  const double s = 2.0 / dx_;
  out[0] = s * y[1];
  for (std::size_t j = 1; j + 1 < n_; ++j) out[j] = s * (y[j + 1] - y[j - 1]);
  out[n_ - 1] = -s * y[n_ - 2];
  solve_averaging(out);
}

void DerivativeOperator::apply_pair(std::span<const cplx> y_a, std::span<const cplx> y_b, std::span<cplx> out_a,
                                    std::span<cplx> out_b) const {
  if (y_a.size() != n_ || y_b.size() != n_ || out_a.size() != n_ || out_b.size() != n_)
    throw Error(ErrorKind::LengthMismatch, "derivative input size");
  const double s = 2.0 / dx_;
  const std::size_t last = n_ - 1;
  // forward sweep fused with the stencil
  cplx fa = s * y_a[1] * inv_diag_[0];
  cplx fb = s * y_b[1] * inv_diag_[0];
  out_a[0] = fa;
  out_b[0] = fb;
  for (std::size_t j = 1; j < last; ++j) {
    fa = (s * (y_a[j + 1] - y_a[j - 1]) - fa) * inv_diag_[j];
    fb = (s * (y_b[j + 1] - y_b[j - 1]) - fb) * inv_diag_[j];
    out_a[j] = fa;
    out_b[j] = fb;
  }
  fa = (-s * y_a[last - 1] - fa) * inv_diag_[last];
  fb = (-s * y_b[last - 1] - fb) * inv_diag_[last];
  out_a[last] = fa;
  out_b[last] = fb;
  for (std::size_t j = last; j-- > 0;) {
    fa = out_a[j] - c_prime_[j] * fa;
    fb = out_b[j] - c_prime_[j] * fb;
    out_a[j] = fa;
    out_b[j] = fb;
  }
}

std::vector<cplx> DerivativeOperator::apply(std::span<const cplx> y) const {
  std::vector<cplx> out(n_);
  apply(y, out);
  return out;
}

DenseMatrix dense_derivative_matrix(std::size_t n, double dx) {
  if (n < 2 || n > kDenseGuard)
    throw Error(ErrorKind::SizeGuardExceeded, "dense derivative limited to 2 <= n <= 4096, got " + std::to_string(n));
  if (!(dx > 0.0)) throw Error(ErrorKind::InvalidGrid, "d_x must be positive");
  const double np1 = static_cast<double>(n + 1);
  auto minv = [&](std::ptrdiff_t i, std::ptrdiff_t k) -> double {
    if (i < 0 || k < 0 || i >= static_cast<std::ptrdiff_t>(n) || k >= static_cast<std::ptrdiff_t>(n)) return 0.0;
    const auto lo = std::min(i, k);
    const auto hi = std::max(i, k);
    const double sign = ((i + k) % 2 == 0) ? 1.0 : -1.0;
    return sign * static_cast<double>(lo + 1) * static_cast<double>(static_cast<std::ptrdiff_t>(n) - hi) / np1;
  };
  DenseMatrix d{n, std::vector<double>(n * n)};
  const double s = 2.0 / dx;
  // (M^{-1} S)_{ij} = M^{-1}_{i,j-1} - M^{-1}_{i,j+1}
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto ii = static_cast<std::ptrdiff_t>(i);
      const auto jj = static_cast<std::ptrdiff_t>(j);
      d.data[i * n + j] = s * (minv(ii, jj - 1) - minv(ii, jj + 1));
    }
  }
  return d;
}

double derivative_spectral_radius(std::size_t n, double dx) {
  return (2.0 / dx) / std::tan(std::numbers::pi / static_cast<double>(n + 1));
}

SpectralInterval spectral_bounds(double v_min, double v_max, double m_max, double dx) {
  if (!(dx > 0.0)) throw Error(ErrorKind::InvalidGrid, "d_x must be positive");
  if (m_max < 0.0) throw Error(ErrorKind::InvalidSpec, "m_max must be non-negative");
  const double p_max = std::numbers::pi / dx;
  const double e = std::sqrt(p_max * p_max + m_max * m_max);
  return {v_min - e, v_max + e};
}

SpectralInterval with_margin(const SpectralInterval& interval, double fraction) {
  const double c = interval.center();
  const double h = interval.half_width() * (1.0 + fraction);
  return {c - h, c + h};
}

HamiltonianOperator::HamiltonianOperator(const Grid1D& grid, std::vector<double> potential, std::vector<double> mass)
    : grid_(grid), potential_(std::move(potential)), mass_(std::move(mass)), derivative_(grid.size(), grid.dx()) {
  if (potential_.size() != grid.size() || mass_.size() != grid.size())
    throw Error(ErrorKind::LengthMismatch, "potential and mass arrays must have n_points entries");
}

void HamiltonianOperator::apply(std::span<const cplx> in, std::span<cplx> out, double shift, double scale) const {
  const std::size_t n = grid_.size();
  if (in.size() != 2 * n || out.size() != 2 * n) throw Error(ErrorKind::LengthMismatch, "flat spinor size");
  const auto up_in = in.subspan(0, n);
  const auto lo_in = in.subspan(n, n);
  auto up_out = out.subspan(0, n);
  auto lo_out = out.subspan(n, n);
  // D Chi lands in the upper half, D Sigma in the lower half
  derivative_.apply_pair(lo_in, up_in, up_out, lo_out);
  const cplx mi(0.0, -1.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double v = potential_[j] - shift;
    const double m = mass_[j];
    up_out[j] = scale * ((v + m) * up_in[j] + mi * up_out[j]);
    lo_out[j] = scale * (mi * lo_out[j] + (v - m) * lo_in[j]);
  }
}

SpinorField HamiltonianOperator::apply(const SpinorField& field) const {
  const std::size_t n = grid_.size();
  if (field.size() != n) throw Error(ErrorKind::LengthMismatch, "field does not match the Hamiltonian grid");
  std::vector<cplx> in(2 * n), out(2 * n);
  std::copy(field.upper.begin(), field.upper.end(), in.begin());
  std::copy(field.lower.begin(), field.lower.end(), in.begin() + static_cast<std::ptrdiff_t>(n));
  apply(in, out);
  SpinorField result(grid_);
  std::copy(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), result.upper.begin());
  std::copy(out.begin() + static_cast<std::ptrdiff_t>(n), out.end(), result.lower.begin());
  return result;
}

double HamiltonianOperator::v_min() const noexcept { return *std::min_element(potential_.begin(), potential_.end()); }
double HamiltonianOperator::v_max() const noexcept { return *std::max_element(potential_.begin(), potential_.end()); }
double HamiltonianOperator::m_abs_max() const noexcept {
  double m = 0.0;
  for (double v : mass_) m = std::max(m, std::abs(v));
  return m;
}

HamiltonianOperator assemble_hamiltonian(const Grid1D& grid, std::vector<double> potential, std::vector<double> mass) {
  return HamiltonianOperator(grid, std::move(potential), std::move(mass));
}

SpectralInterval paper_spectral_bounds(const HamiltonianOperator& h) {
  return spectral_bounds(h.v_min(), h.v_max(), h.m_abs_max(), h.grid().dx());
}

SpectralInterval lattice_spectral_bounds(const HamiltonianOperator& h) {
  const double p = derivative_spectral_radius(h.size(), h.grid().dx());
  const double m = h.m_abs_max();
  const double e = std::sqrt(p * p + m * m);
  return {h.v_min() - e, h.v_max() + e};
}

void write_disorder_csv(std::ostream& out, const HamiltonianOperator& h) {
  out << "x,V,m\n";
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double row[] = {h.grid().x(j), h.potential()[j], h.mass()[j]};
    write_csv_row(out, row);
  }
}

}  // namespace dirac
