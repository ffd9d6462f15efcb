#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "dirac/grid.hpp"

namespace dirac {

/// Probability density on a lattice.
struct DensityProfile {
  Grid1D grid;
  std::vector<double> p;
  bool normalized = false;

  /// Validates p >= 0; with `renormalize` the profile is scaled to sum(p) d_x = 1.
  static DensityProfile from_density(const Grid1D& grid, std::vector<double> p, bool renormalize = true);
};

inline constexpr double kNormalizationTolerance = 1e-10;
inline constexpr double kDensityFloor = 1e-30;

/// Tabulated value of C, the localization functional of a unit-width Gaussian.
inline constexpr double kUniversalConstant = 0.3789041452;

/// C = -1/4 + erf(1)/2 + e^{-1}/sqrt(pi), evaluated at run time.
double universal_constant();

/// L[p] = sum over interior nodes of |sqrt(p_j) (sqrt p)''_j| d_x, with a
/// 3-point second difference. Nodes with p_j < 1e-30 contribute nothing.
/// Throws UnnormalizedInput for profiles that are not normalized.
double localization_functional(const DensityProfile& profile);

/// W = sqrt(C / L). Throws ZeroFunctional when L vanishes.
double localization_width(const DensityProfile& profile);

/// p_L(x) = p(x / L) / L on the same grid, renormalized.
///
/// sqrt(p) is interpolated with a natural cubic spline; linear interpolation
/// introduces kinks that the second difference in L amplifies.
/// Throws SupportOverflow if more than 1e-8 probability would leave the grid.
DensityProfile rescale_density(const DensityProfile& profile, double scale);

/// Columns t, W.
void write_width_series_csv(std::ostream& out, std::span<const double> times, std::span<const double> widths);

}  // namespace dirac
