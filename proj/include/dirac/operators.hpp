#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "dirac/grid.hpp"

namespace dirac {

/**
 * Compact symmetric first derivative.
 *
 * Solves (f_{j+1} + 2 f_j + f_{j-1}) / 4 = (y_{j+1} - y_{j-1}) / (2 d_x)
 * with y_{-1} = y_N = f_{-1} = f_N = 0, i.e. f = (2/d_x) M^{-1} S y with
 * M = tridiag(1, 2, 1) and S = tridiag(-1, 0, 1). The averaging matrix is
 * factorized once; apply() is O(n).
 *
 * D is similar to an antisymmetric matrix (through M^{1/2}) so its
 * eigenvalues are purely imaginary, -i (2/d_x) cot(pi l / (n+1)), l = 1..n.
 * It is not itself antisymmetric: D + D^T is a rank-2 term built from the
 * first and last columns of M^{-1}.
 */
class DerivativeOperator {
 public:
  DerivativeOperator(std::size_t n_points, double dx);

  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }

  /// out = D y. `out` may not alias `y`.
  void apply(std::span<const cplx> y, std::span<cplx> out) const;
  std::vector<cplx> apply(std::span<const cplx> y) const;

  /// Solves M f = r in place (Thomas sweep with the cached factorization).
  void solve_averaging(std::span<cplx> r) const;

  /// out_a = D y_a and out_b = D y_b in one interleaved sweep.
  void apply_pair(std::span<const cplx> y_a, std::span<const cplx> y_b, std::span<cplx> out_a,
                  std::span<cplx> out_b) const;

 private:
  std::size_t n_;
  double dx_;
  std::vector<double> c_prime_;   // super-diagonal of the normalized U factor
  std::vector<double> inv_diag_;  // 1 / pivot
};

/// Row-major dense n x n matrix, used as a test oracle only.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> data;
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

inline constexpr std::size_t kDenseGuard = 4096;

/// Closed form of D from the explicit inverse
///   M^{-1}_{ik} = (-1)^{i+k} (min(i,k)+1)(n - max(i,k)) / (n+1).
DenseMatrix dense_derivative_matrix(std::size_t n, double dx);

/// Largest |eigenvalue| of D: (2/d_x) cot(pi/(n+1)).
double derivative_spectral_radius(std::size_t n, double dx);

struct SpectralInterval {
  double e_min = -1.0;
  double e_max = 1.0;

  double center() const noexcept { return 0.5 * (e_max + e_min); }
  double half_width() const noexcept { return 0.5 * (e_max - e_min); }
};

/// Particle-in-a-box estimate p_max = pi/d_x:
///   e_max = V_max + sqrt(pi^2/d_x^2 + m_max^2), e_min = V_min - sqrt(...).
SpectralInterval spectral_bounds(double v_min, double v_max, double m_max, double dx);

/// Widens the half-width by `fraction` around the same center.
SpectralInterval with_margin(const SpectralInterval& interval, double fraction);

inline constexpr double kSpectralMargin = 0.05;

/**
 * Site-wise Dirac Hamiltonian
 *   (H psi)_upper = (V + m) Sigma - i D Chi
 *   (H psi)_lower = -i D Sigma + (V - m) Chi
 */
class HamiltonianOperator {
 public:
  HamiltonianOperator(const Grid1D& grid, std::vector<double> potential, std::vector<double> mass);

  const Grid1D& grid() const noexcept { return grid_; }
  const std::vector<double>& potential() const noexcept { return potential_; }
  const std::vector<double>& mass() const noexcept { return mass_; }
  const DerivativeOperator& derivative() const noexcept { return derivative_; }
  std::size_t size() const noexcept { return grid_.size(); }

  SpinorField apply(const SpinorField& field) const;

  /// Flat layout [Sigma_0..Sigma_{n-1}, Chi_0..Chi_{n-1}]:
  ///   out = scale * (H in - shift * in).  `out` may not alias `in`.
  void apply(std::span<const cplx> in, std::span<cplx> out, double shift = 0.0, double scale = 1.0) const;

  double v_min() const noexcept;
  double v_max() const noexcept;
  double m_abs_max() const noexcept;

 private:
  Grid1D grid_;
  std::vector<double> potential_;
  std::vector<double> mass_;
  DerivativeOperator derivative_;
};

HamiltonianOperator assemble_hamiltonian(const Grid1D& grid, std::vector<double> potential, std::vector<double> mass);

/// Interval from spectral_bounds() using the site-wise extrema of H (no margin).
SpectralInterval paper_spectral_bounds(const HamiltonianOperator& h);

/// Interval that encloses the spectrum of the discrete operator: the derivative
/// radius (2/d_x) cot(pi/(n+1)) replaces pi/d_x (no margin).
SpectralInterval lattice_spectral_bounds(const HamiltonianOperator& h);

/// Columns x, V, m.
void write_disorder_csv(std::ostream& out, const HamiltonianOperator& h);

}  // namespace dirac
