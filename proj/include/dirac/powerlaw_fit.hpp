#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace dirac {

struct SweepPoint;

/// Model W(s) = (a s + b)^{-nu}.
double power_law(double s, double a, double b, double nu);

/// d/da, d/db, d/dnu of power_law.
std::array<double, 3> power_law_gradient(double s, double a, double b, double nu);

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double nu = 0.0;
  double r_squared = 0.0;
  double sse = 0.0;  // weighted
  std::vector<double> residuals;  // w_i - model(s_i)
  bool converged = false;
  std::size_t iterations = 0;
};

struct FitOptions {
  std::array<double, 3> nu_starts{0.5, 0.75, 1.0};
  double lambda0 = 1e-3;
  double step_tolerance = 1e-10;
  std::size_t max_iterations = 200;
};

/// Weighted Levenberg-Marquardt fit. Each start nu0 initializes (a, b) from
/// w^{-1/nu0} = a s + b through the first and last points; the winner has the
/// lowest weighted SSE, ties going to the lower nu.
/// Throws DegenerateData (too few points, constant or non-positive w) or
/// NonConvergence (no start converged).
FitResult fit_power_law(std::span<const double> s, std::span<const double> w, std::span<const double> weights,
                        const FitOptions& options = {});

/// 1 - SS_res/SS_tot, both weighted, SS_tot about the weighted mean.
/// Throws ZeroVariance when SS_tot = 0.
double r_squared(std::span<const double> w, std::span<const double> w_fit, std::span<const double> weights);

enum class SpreadMeasure { StandardError, StandardDeviation };

/// 1/sigma^2 per point; points with sigma = 0 get 10x the largest finite weight.
std::vector<double> weights_from_spread(std::span<const double> sigma);
std::vector<double> weights_from_sweep(std::span<const SweepPoint> points,
                                       SpreadMeasure measure = SpreadMeasure::StandardError);

/// Columns s, W, W_fit, residual, weight; parameters in a leading comment block.
void write_fit_csv(std::ostream& out, const FitResult& fit, std::span<const double> s, std::span<const double> w,
                   std::span<const double> weights);

}  // namespace dirac
