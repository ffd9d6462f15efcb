#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dirac/chebyshev.hpp"
#include "dirac/disorder.hpp"
#include "dirac/free_analytic.hpp"
#include "dirac/grid.hpp"
#include "dirac/powerlaw_fit.hpp"

namespace dirac {

inline constexpr const char* kCodeVersion = "dirac1d 1.0.0";

/// Every physics and protocol parameter of a run. Serialized as an INI
/// document; each output file echoes it as a '# '-prefixed header.
struct RunConfig {
  // [grid]
  std::size_t n_points = 1024;
  double x_min = -1.0;
  double x_max = 1.0;

  // [packet] used by the custom scenario
  double sigma = 0.1;
  double k1 = 0.0;
  double k2 = 0.0;
  double sigma0_re = 1.0 / std::numbers::sqrt2, sigma0_im = 0.0;
  double chi0_re = 1.0 / std::numbers::sqrt2, chi0_im = 0.0;
  double x_center = 0.0;

  // [free]
  std::string scenario = "static";  // static | opposite | parallel | custom
  double mass = 30.0;               // custom scenario
  double t_total = 0.3;
  std::size_t snapshots = 30;
  double quad_window = 8.0;
  std::size_t quad_nodes = 4097;

  // [propagator]
  std::string order = "auto:1e-14";  // auto[:TOL] | fixed:K | paper
  double dt = 0.0;                   // 0: derived from max_a
  double max_a = 1000.0;
  std::string interval = "lattice";  // lattice | paper
  double margin = kSpectralMargin;

  // [disorder]
  std::string kind = "potential";
  std::vector<double> strengths;  // empty: defaults for the kind
  std::size_t samples = 100;
  double t_star = kDefaultTStar;
  std::size_t disorder_snapshots = 128;
  double disorder_sigma = 0.04;
  double mean_mass = 500.0;
  double mean_potential = 0.0;
  std::string on_failure = "abort";  // abort | exclude

  // [fit]
  std::string fit_weights = "sem";  // sem | std

  // [analytic]
  double analytic_sigma = 0.1;
  double analytic_k0 = 10.0;
  double analytic_t_max = 1.0;
  double analytic_m_max = 100.0;

  // [run]
  std::uint64_t seed = 20240601;

  // execution only; never serialized
  std::string out = "out";
  std::size_t threads = 0;

  bool operator==(const RunConfig&) const = default;

  void validate() const;
};

/// Section/key INI text, numbers with 17 significant digits.
std::string serialize_config(const RunConfig& config);

/// Parses INI text over the defaults in `base`. Unknown keys are config errors.
RunConfig parse_config(const std::string& text, RunConfig base = {});

/// Reads a config file. Files whose first line starts with '#' (output files)
/// contribute only their leading comment block with the "# " prefix removed.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// The "# "-prefixed header written at the top of every output file.
std::string config_header(const RunConfig& config);

OrderPolicy parse_order(const std::string& text);
IntervalSource parse_interval(const std::string& text);
std::vector<double> parse_list(const std::string& text);

Grid1D make_grid(const RunConfig& config);
PropagationOptions make_propagation_options(const RunConfig& config);
EnsembleSetup make_ensemble_setup(const RunConfig& config);

/// Packet and mass for the configured free-particle scenario.
struct FreeScenario {
  GaussianSpec packet;
  double mass = 0.0;
};
FreeScenario make_scenario(const RunConfig& config);

/// Exclusive lock file inside an output directory, removed on destruction.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

}  // namespace dirac
