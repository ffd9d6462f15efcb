#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "dirac/config.hpp"

namespace dirac {

/// Density heatmap: header row "t" followed by the x coordinates, one row per snapshot.
void write_heatmap_csv(std::ostream& out, const Grid1D& grid, std::span<const double> times,
                       std::span<const std::vector<double>> densities);

/// Free-particle benchmark: Chebyshev and quadrature heatmaps plus the
/// per-snapshot relative L2 difference and <x> series.
int cmd_free(const RunConfig& config, std::ostream& log);

/// Strength sweep: W(t) and spread series per strength, and the sweep table at t_star.
int cmd_disorder(const RunConfig& config, std::ostream& log);

/// Weighted power-law fit of one or more sweep CSVs; flags the nu trend when
/// both a potential and a mass sweep are given.
int cmd_fit(const RunConfig& config, const std::vector<std::filesystem::path>& sweeps, std::ostream& log);

/// Closed-form curves: width law, dispersion rate, sigma rule, massless densities.
int cmd_analytic(const RunConfig& config, std::ostream& log);

/// Quick internal consistency checks, one PASS/FAIL line each.
int cmd_selftest(const RunConfig& config, std::ostream& log);

}  // namespace dirac
