#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "dirac/commands.hpp"
#include "dirac/error.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> grid_n;
  std::optional<double> grid_extent;
  std::optional<double> dt;
  std::optional<std::string> order;
  std::optional<std::string> scenario;
  std::optional<std::string> kind;
  std::optional<std::string> strengths;
  std::optional<std::size_t> samples;
  std::optional<double> t_star;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "INI config file, or an output file whose header to reuse");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--grid-n", o.grid_n, "number of lattice nodes");
  app.add_option("--grid-extent", o.grid_extent, "half-width L of the domain [-L, L]");
  app.add_option("--dt", o.dt, "upper bound on the time step");
  app.add_option("--order", o.order, "auto[:TOL] | fixed:K | paper");
  app.add_option("--threads", o.threads, "worker threads for ensembles (0: all cores)");
}

dirac::RunConfig resolve(const Overrides& o) {
  dirac::RunConfig c = o.config ? dirac::load_config(*o.config) : dirac::RunConfig{};
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.grid_n) c.n_points = *o.grid_n;
  if (o.grid_extent) {
    c.x_min = -*o.grid_extent;
    c.x_max = *o.grid_extent;
  }
  if (o.dt) c.dt = *o.dt;
  if (o.order) c.order = *o.order;
  if (o.scenario) c.scenario = *o.scenario;
  if (o.kind) c.kind = *o.kind;
  if (o.strengths) c.strengths = dirac::parse_list(*o.strengths);
  if (o.samples) c.samples = *o.samples;
  if (o.t_star) c.t_star = *o.t_star;
  if (o.threads) c.threads = *o.threads;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1+1D Dirac wave-packet engine"};
  app.require_subcommand(1);
  Overrides o;
  std::vector<std::string> sweeps;

  auto* free_cmd = app.add_subcommand("free", "free-particle benchmark against the quadrature solution");
  add_common(*free_cmd, o);
  free_cmd->add_option("--scenario", o.scenario, "static | opposite | parallel | custom");

  auto* disorder_cmd = app.add_subcommand("disorder", "disorder ensembles and strength sweep");
  add_common(*disorder_cmd, o);
  disorder_cmd->add_option("--kind", o.kind, "potential | mass");
  disorder_cmd->add_option("--strengths", o.strengths, "comma separated strengths");
  disorder_cmd->add_option("--samples", o.samples, "samples per strength");
  disorder_cmd->add_option("--t-star", o.t_star, "measurement time");

  auto* fit_cmd = app.add_subcommand("fit", "power-law fit of sweep CSVs");
  add_common(*fit_cmd, o);
  fit_cmd->add_option("sweeps", sweeps, "sweep CSV files")->required();

  auto* analytic_cmd = app.add_subcommand("analytic", "closed-form curves");
  add_common(*analytic_cmd, o);

  auto* selftest_cmd = app.add_subcommand("selftest", "internal consistency checks");
  add_common(*selftest_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? dirac::kExitOk : dirac::kExitConfig;
  }

  try {
    const auto config = resolve(o);
    if (*free_cmd) return dirac::cmd_free(config, std::cout);
    if (*disorder_cmd) return dirac::cmd_disorder(config, std::cout);
    if (*fit_cmd) return dirac::cmd_fit(config, {sweeps.begin(), sweeps.end()}, std::cout);
    if (*analytic_cmd) return dirac::cmd_analytic(config, std::cout);
    return dirac::cmd_selftest(config, std::cout);
  } catch (const dirac::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dirac::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dirac::kExitNumeric;
  }
}
