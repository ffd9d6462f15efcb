#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

namespace dirac {

using cplx = std::complex<double>;

/**
 * Uniform spatial lattice x_j = x_min + j*d_x, j = 0..n_points-1.
 *
 * Natural units (hbar = c = 1). Construction validates n_points >= 8 and
 * x_max > x_min; instances are immutable afterwards.
 */
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n_points);

  std::size_t size() const noexcept { return n_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double dx() const noexcept { return dx_; }
  double x(std::size_t j) const noexcept { return x_min_ + static_cast<double>(j) * dx_; }
  std::vector<double> coordinates() const;

  bool operator==(const Grid1D& other) const noexcept {
    return n_ == other.n_ && x_min_ == other.x_min_ && x_max_ == other.x_max_;
  }

  static constexpr std::size_t kMinPoints = 8;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

/// Two-component spinor (upper = Sigma, lower = Chi) sampled on a grid.
struct SpinorField {
  Grid1D grid;
  std::vector<cplx> upper;
  std::vector<cplx> lower;

  explicit SpinorField(const Grid1D& g)
      : grid(g), upper(g.size(), cplx{}), lower(g.size(), cplx{}) {}
  SpinorField(const Grid1D& g, std::vector<cplx> up, std::vector<cplx> lo);

  std::size_t size() const noexcept { return upper.size(); }
};

/// Gaussian spinor parameters: N_g (Sigma0 e^{i k1 x}, X0 e^{i k2 x}) e^{-(x-xc)^2/4 sigma^2}.
struct GaussianSpec {
  double sigma = 0.1;
  double k1 = 0.0;
  double k2 = 0.0;
  cplx sigma0{1.0 / std::numbers::sqrt2, 0.0};
  cplx chi0{1.0 / std::numbers::sqrt2, 0.0};
  double x_center = 0.0;

  /// Throws Error(InvalidSpec) unless sigma > 0 and |Sigma0|^2+|X0|^2 = 1 within 1e-12.
  void validate() const;
};

/// Continuum normalization (2 pi sigma^2)^{-1/4}.
double gaussian_normalization(double sigma);

// Boundary support rule for constructed packets: probability inside the
// outermost kBoundaryNodes nodes on either side must stay below the threshold.
inline constexpr std::size_t kBoundaryNodes = 10;
inline constexpr double kConstructionBoundaryTolerance = 1e-8;

SpinorField make_gaussian_spinor(const Grid1D& grid, const GaussianSpec& spec);

std::vector<double> probability_density(const SpinorField& field);
double norm_squared(const SpinorField& field);

/// <x> for a normalized field; throws FieldNotNormalized if |norm-1| > 1e-6.
double expectation_position(const SpinorField& field);

/// Probability carried by the outermost `nodes` lattice sites at each end.
double boundary_probability(std::span<const double> density, double dx,
                            std::size_t nodes = kBoundaryNodes);

/// ||a-b|| / ||b|| in the discrete L2 norm (both spinor components).
double relative_l2_distance(const SpinorField& a, const SpinorField& b);
double relative_l2_distance(std::span<const double> a, std::span<const double> b);

/// Columns x, re_upper, im_upper, re_lower, im_lower, density; 17 significant digits.
void write_spinor_csv(std::ostream& out, const SpinorField& field);

}  // namespace dirac
