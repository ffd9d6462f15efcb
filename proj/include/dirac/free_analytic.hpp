#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dirac/grid.hpp"

// Closed-form and quadrature solutions of the free 1+1D Dirac equation
//   i d/dt (Sigma, Chi) = [[m, -i d/dx], [-i d/dx, -m]] (Sigma, Chi).
//
// Time convention: positive-energy modes evolve as e^{-i omega t}, negative
// ones as e^{+i omega t}, i.e. Psi(t) = e^{-itH} Psi(0).

namespace dirac {

using WarningSink = std::function<void(const std::string&)>;

enum class EnergyBranch { Positive, Negative };

/// Plane-wave eigenmode with momentum k, mass m >= 0 and energy +-omega.
struct PlaneWaveMode {
  double k = 0.0;
  double m = 0.0;
  EnergyBranch branch = EnergyBranch::Positive;

  double omega() const noexcept;
};

/// Eigenspinor psi_k(x) (positive branch) or phi_k(x) (negative branch).
/// Throws DegenerateMode when the normalization vanishes (omega -+ m = 0).
std::array<cplx, 2> eigenspinor(const PlaneWaveMode& mode, double x);

/// psi_k^dagger psi_k, independent of x; 1/(2 pi) for every valid mode.
double eigenspinor_pointwise_norm(const PlaneWaveMode& mode);

struct MomentumCoefficients {
  std::vector<double> k_samples;
  std::vector<cplx> pi_plus;
  std::vector<cplx> pi_minus;
};

/// Pi+(k), Pi-(k) of a Gaussian spinor on the given momentum samples.
///
/// The negative-branch normalization is evaluated through
///   (m - omega)/sqrt(omega(omega-m)) = -|k|/sqrt(omega(omega+m))
///   k/sqrt(omega(omega-m))           = sign(k) sqrt((omega+m)/omega)
/// which avoid the 0/0 at k = 0 for m > 0. At exactly k = 0 the X0 term is
/// discontinuous (the basis phi_k flips sign); the right-hand limit is used
/// unless `limit_handling` is false, in which case SingularSample is thrown.
MomentumCoefficients project_gaussian(const GaussianSpec& spec, double m, std::span<const double> k_samples,
                                      bool limit_handling = true);

struct QuadratureSpec {
  double window_multiplier = 8.0;  // half-width in units of 1/sigma
  std::size_t nodes = 4097;        // composite Simpson, forced odd
  bool self_check = true;          // verify the t = 0 reconstruction
  double self_check_tolerance = 1e-8;
};

/// Exact free evolution by composite Simpson quadrature of the k-integral.
SpinorField spectral_propagate(const GaussianSpec& spec, double m, double t, const Grid1D& grid,
                               const QuadratureSpec& quad = {});

/// Two light-speed packets of the m/omega -> 0 limit (requires k1 = k2).
double ultra_relativistic_density(double x, double t, const GaussianSpec& spec);

/// Second-order Taylor data around k_j plus the complex widths.
struct LargeSigmaCoeffs {
  double omega = 0.0;
  double A = 0.0, B = 0.0, C = 0.0;
  double D_plus = 0.0, D_minus = 0.0;
  double E_plus = 0.0, E_minus = 0.0;
  double F_plus = 0.0, F_minus = 0.0;
  // x-independent parts: phi^pm = k_j x + phi_pm, xi^pm = x + xi_pm
  double phi_plus = 0.0, phi_minus = 0.0;
  double xi_plus = 0.0, xi_minus = 0.0;
  cplx sigma2_plus, sigma2_minus;
};

LargeSigmaCoeffs large_sigma_coeffs(double k_j, double m, double sigma, double t);

/// Closed-form evaluation of the second-order (large sigma) approximation via
/// the Gaussian moment integrals for p = 0, 1, 2.
SpinorField large_sigma_propagate(const GaussianSpec& spec, double m, double t, const Grid1D& grid,
                                  const WarningSink& warn = {});

/// Smallest sigma for which the second-order Taylor expansions of k/omega and
/// (omega +- m)/omega keep relative error `eps` at n momentum widths.
double select_sigma_min(double m, double k1, double k2, double n = 5.0, double eps = 1e-3);

/// sigma_j(t) = sqrt(sigma^2 + m^4 t^2 / ((m^2+k_j^2)^3 sigma^2)).
double dispersion_width(double t, double sigma, double m, double k_j);

/// R(m) = m^2 / (sigma (m^2+k_j^2)^{3/2}), long-time growth rate of dispersion_width.
double dispersion_rate(double m, double sigma, double k_j);

/// Density width implied by the complex width sigma2 = sigma^2 -+ i m^2 t/(2 omega^3):
/// |sigma2|^2 / sigma^2 = sigma^2 + m^4 t^2 / (4 omega^6 sigma^2).
double complex_width_density_width(double t, double sigma, double m, double k_j);

}  // namespace dirac
