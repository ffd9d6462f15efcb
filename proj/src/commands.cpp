#include "dirac/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dirac/csv.hpp"
#include "dirac/error.hpp"
#include "dirac/localization.hpp"

namespace dirac {

namespace {

std::ofstream open_output(const RunConfig& config, const std::string& name) {
  const auto path = std::filesystem::path(config.out) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
  out << config_header(config);
  return out;
}

std::string strength_tag(double s) { return "s" + format_number(s); }

double x_mean(const Grid1D& grid, std::span<const double> density) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < density.size(); ++j) {
    num += grid.x(j) * density[j];
    den += density[j];
  }
  return num / den;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

void print_check(std::ostream& log, const Check& c) {
  log << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
}

std::string fmt(double v) { return format_number(v); }

}  // namespace

void write_heatmap_csv(std::ostream& out, const Grid1D& grid, std::span<const double> times,
                       std::span<const std::vector<double>> densities) {
  if (times.size() != densities.size()) throw Error(ErrorKind::LengthMismatch, "times and densities differ");
  out << 't';
  for (std::size_t j = 0; j < grid.size(); ++j) out << ',' << format_number(grid.x(j));
  out << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << format_number(times[i]);
    for (double p : densities[i]) out << ',' << format_number(p);
    out << '\n';
  }
}

int cmd_free(const RunConfig& config, std::ostream& log) {
  config.validate();
  const OutputLock lock(config.out);
  const auto grid = make_grid(config);
  const auto scenario = make_scenario(config);
  const auto field = make_gaussian_spinor(grid, scenario.packet);
  const HamiltonianOperator h(grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), scenario.mass));

  auto options = make_propagation_options(config);
  options.keep_fields = true;
  options.warn = [&log](const std::string& msg) { log << "warning: " << msg << '\n'; };
  const auto traj = propagate(parse_order(config.order), h, field, config.t_total, config.snapshots, options);

  const QuadratureSpec quad{config.quad_window, config.quad_nodes};
  std::vector<std::vector<double>> reference;
  std::vector<double> diff;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto exact = spectral_propagate(scenario.packet, scenario.mass, traj.times[i], grid, quad);
    reference.push_back(probability_density(exact));
    diff.push_back(relative_l2_distance(traj.fields[i], exact));
  }

  const std::string stem = "free_" + config.scenario;
  {
    auto out = open_output(config, stem + "_chebyshev.csv");
    write_heatmap_csv(out, grid, traj.times, traj.densities);
  }
  {
    auto out = open_output(config, stem + "_spectral.csv");
    write_heatmap_csv(out, grid, traj.times, reference);
  }
  double max_diff = 0.0;
  double x0 = 0.0, drift = 0.0;
  {
    auto out = open_output(config, stem + "_difference.csv");
    out << "t,rel_l2,x_mean_chebyshev,x_mean_spectral\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double xc = x_mean(grid, traj.densities[i]);
      const double xs = x_mean(grid, reference[i]);
      if (i == 0) x0 = xc;
      drift = std::max(drift, std::abs(xc - x0));
      max_diff = std::max(max_diff, diff[i]);
      const double row[] = {traj.times[i], diff[i], xc, xs};
      write_csv_row(out, row);
    }
  }
  log << "free " << config.scenario << ": " << traj.steps << " steps, order " << traj.plan.order << ", a "
      << fmt(traj.plan.a) << "\n  max relative L2 vs quadrature " << fmt(max_diff) << "\n  max |<x>(t) - <x>(0)| "
      << fmt(drift) << '\n';
  return kExitOk;
}

int cmd_disorder(const RunConfig& config, std::ostream& log) {
  config.validate();
  const OutputLock lock(config.out);
  const auto kind = parse_disorder_kind(config.kind);
  const auto strengths = config.strengths.empty() ? default_strengths(kind) : config.strengths;
  const auto setup = make_ensemble_setup(config);
  const auto sweep =
      sweep_strengths(kind, strengths, config.samples, setup, config.seed, config.mean_mass, config.mean_potential);

  const std::string stem = std::string("disorder_") + to_string(kind);
  for (const auto& e : sweep.ensembles) {
    {
      auto out = open_output(config, stem + "_W_" + strength_tag(e.spec.strength) + ".csv");
      write_ensemble_width_csv(out, e);
    }
    auto out = open_output(config, stem + "_Wstd_" + strength_tag(e.spec.strength) + ".csv");
    write_ensemble_spread_csv(out, e);
  }
  {
    auto out = open_output(config, stem + "_sweep.csv");
    write_sweep_csv(out, sweep, setup.grid);
  }
  log << "disorder " << to_string(kind) << " at t* = " << fmt(sweep.t_star) << " (d_x " << fmt(setup.grid.dx())
      << ", " << config.samples << " samples)\n";
  for (const auto& p : sweep.points)
    log << "  s " << fmt(p.strength) << "  W " << fmt(p.w_mean) << "  std " << fmt(p.w_std) << "  sem "
        << fmt(p.w_sem) << '\n';
  return kExitOk;
}

int cmd_fit(const RunConfig& config, const std::vector<std::filesystem::path>& sweeps, std::ostream& log) {
  config.validate();
  if (sweeps.empty()) throw Error(ErrorKind::Config, "fit needs at least one sweep CSV");
  const OutputLock lock(config.out);
  const auto measure = config.fit_weights == "sem" ? SpreadMeasure::StandardError : SpreadMeasure::StandardDeviation;

  std::ostringstream report;
  double nu_potential = std::nan(""), nu_mass = std::nan("");
  for (const auto& path : sweeps) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open sweep '" + path.string() + "'");
    const auto table = read_csv(in);
    std::string header;
    for (const auto& c : table.comments) header += (c.size() >= 2 && c[1] == ' ' ? c.substr(2) : c.substr(1)) + '\n';
    const auto source = parse_config(header);

    std::vector<SweepPoint> points;
    const auto s = table.column_values("s");
    const auto w = table.column_values("W_mean");
    const auto sd = table.column_values("W_std");
    const auto n = table.column_values("n_samples");
    for (std::size_t i = 0; i < s.size(); ++i)
      points.push_back({s[i], w[i], sd[i], sd[i] / std::sqrt(n[i]), static_cast<std::size_t>(n[i])});
    const auto weights = weights_from_sweep(points, measure);
    const auto fit = fit_power_law(s, w, weights);

    {
      auto out = open_output(config, "fit_" + source.kind + ".csv");
      write_fit_csv(out, fit, s, w, weights);
    }
    report << "fit " << source.kind << " (" << path.filename().string() << ", weights " << config.fit_weights
           << ")\n  a = " << fmt(fit.a) << "\n  b = " << fmt(fit.b) << "\n  nu = " << fmt(fit.nu)
           << "\n  R^2 = " << fmt(fit.r_squared) << "\n  nu in (0.5, 1): " << (fit.nu > 0.5 && fit.nu < 1.0 ? "yes" : "no")
           << '\n';
    (source.kind == "potential" ? nu_potential : nu_mass) = fit.nu;
  }
  if (!std::isnan(nu_potential) && !std::isnan(nu_mass))
    report << "trend nu_potential > nu_mass: " << (nu_potential > nu_mass ? "yes" : "no") << " (" << fmt(nu_potential)
           << " vs " << fmt(nu_mass) << ")\n";
  {
    auto out = open_output(config, "fit_report.txt");
    out << report.str();
  }
  log << report.str();
  return kExitOk;
}

int cmd_analytic(const RunConfig& config, std::ostream& log) {
  config.validate();
  const OutputLock lock(config.out);
  const double sigma = config.analytic_sigma;
  const double k0 = config.analytic_k0;
  const double m_max = config.analytic_m_max;
  constexpr std::size_t kSamples = 401;

  {
    auto out = open_output(config, "analytic_width.csv");
    out << "t,m,k,width,complex_width\n";
    for (double frac : {0.0, 0.01, 0.05, 0.1, 0.5, 1.0}) {
      const double m = frac * m_max;
      for (std::size_t i = 0; i < kSamples; ++i) {
        const double t = config.analytic_t_max * static_cast<double>(i) / (kSamples - 1);
        const double row[] = {t, m, k0, dispersion_width(t, sigma, m, k0), complex_width_density_width(t, sigma, m, k0)};
        write_csv_row(out, row);
      }
    }
  }
  double best_m = 0.0, best_r = -1.0;
  {
    auto out = open_output(config, "analytic_rate.csv");
    out << "m,k,R\n";
    for (std::size_t i = 0; i < kSamples; ++i) {
      const double m = m_max * static_cast<double>(i) / (kSamples - 1);
      const double r = (m == 0.0 && k0 == 0.0) ? 0.0 : dispersion_rate(m, sigma, k0);
      if (r > best_r) {
        best_r = r;
        best_m = m;
      }
      const double row[] = {m, k0, r};
      write_csv_row(out, row);
    }
  }
  {
    auto out = open_output(config, "analytic_sigma_rule.csv");
    out << "m,k1,k2,sigma_min\n";
    for (double m : {1.0, 10.0, 30.0, 50.0, 100.0, 500.0}) {
      for (const auto& [k1, k2] : {std::pair{0.0, 0.0}, std::pair{k0, k0}, std::pair{k0, -k0}}) {
        double value = std::nan("");
        try {
          value = select_sigma_min(m, k1, k2);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::NotApplicable) throw;
        }
        const double row[] = {m, k1, k2, value};
        write_csv_row(out, row);
      }
    }
  }
  {
    const auto grid = make_grid(config);
    GaussianSpec packet{sigma, k0, k0};
    std::vector<double> times;
    std::vector<std::vector<double>> densities;
    for (std::size_t i = 0; i <= 10; ++i) {
      const double t = config.analytic_t_max * static_cast<double>(i) / 10.0;
      times.push_back(t);
      std::vector<double> p(grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j) p[j] = ultra_relativistic_density(grid.x(j), t, packet);
      densities.push_back(std::move(p));
    }
    auto out = open_output(config, "analytic_massless.csv");
    write_heatmap_csv(out, grid, times, densities);
  }
  log << "analytic: dispersion rate peaks at m = " << fmt(best_m) << " (sqrt(2) k0 = " << fmt(std::sqrt(2.0) * k0)
      << ")\n";
  return kExitOk;
}

int cmd_selftest(const RunConfig& config, std::ostream& log) {
  std::vector<Check> checks;

  const double c = universal_constant();
  checks.push_back({"universal-constant", std::abs(c - kUniversalConstant) < 1e-9, "C = " + fmt(c)});

  const double j0 = bessel_j(0, 1.0), j1 = bessel_j(1, 1.0);
  checks.push_back({"bessel", std::abs(j0 - 0.7651976866) < 1e-10 && std::abs(j1 - 0.4400505857) < 1e-10,
                    "J0(1) = " + fmt(j0) + ", J1(1) = " + fmt(j1)});

  {
    const std::size_t n = 64;
    const double dx = 0.03;
    const auto dense = dense_derivative_matrix(n, dx);
    const DerivativeOperator d(n, dx);
    double worst = 0.0;
    std::vector<cplx> e(n);
    for (std::size_t col = 0; col < n; ++col) {
      std::fill(e.begin(), e.end(), cplx{});
      e[col] = 1.0;
      const auto f = d.apply(e);
      for (std::size_t row = 0; row < n; ++row) worst = std::max(worst, std::abs(f[row] - dense(row, col)));
    }
    checks.push_back({"derivative-dense", worst < 1e-10, "max |dense - solve| = " + fmt(worst)});
  }

  {
    const Grid1D grid(-1.0, 1.0, 512);
    const GaussianSpec packet{0.1};
    const auto field = make_gaussian_spinor(grid, packet);
    const HamiltonianOperator h(grid, std::vector<double>(512, 0.0), std::vector<double>(512, 30.0));
    PropagationOptions opts;
    opts.keep_fields = true;
    const auto traj = propagate(OrderPolicy::automatic(), h, field, 0.1, 1, opts);
    const auto exact = spectral_propagate(packet, 30.0, 0.1, grid);
    const double d = relative_l2_distance(traj.fields.back(), exact);
    checks.push_back({"chebyshev-vs-quadrature", d < 1e-3, "relative L2 = " + fmt(d)});
  }

  {
    const std::vector<double> s{0, 1, 2, 4, 6, 8, 10, 12};
    std::vector<double> w;
    for (double si : s) w.push_back(power_law(si, 30.08, 52.42, 0.7897));
    const std::vector<double> weights(s.size(), 1.0);
    const auto fit = fit_power_law(s, w, weights);
    const double err = std::max({std::abs(fit.a - 30.08), std::abs(fit.b - 52.42), std::abs(fit.nu - 0.7897)});
    checks.push_back({"fit-recovery", err < 1e-6, "max parameter error = " + fmt(err)});
  }

  {
    // oscillation signature of W and its spread at the strongest default strength
    auto setup = make_ensemble_setup(config);
    setup.grid = Grid1D(config.x_min, config.x_max, 512);
    const DisorderSpec spec{DisorderKind::Potential, default_strengths(DisorderKind::Potential).back(), config.mean_mass,
                            config.mean_potential};
    const auto e = run_ensemble(spec, 16, setup, config.seed);
    std::vector<double> wm, ws;
    for (std::size_t i = 0; i < e.times.size(); ++i) {
      if (e.times[i] <= 0.3) continue;
      wm.push_back(e.w_mean[i]);
      ws.push_back(e.w_std[i]);
    }
    const auto bm = dominant_frequency_bin(wm);
    const auto bs = dominant_frequency_bin(ws);
    checks.push_back({"oscillation-signature", bm == bs,
                      "dominant bins W " + std::to_string(bm) + ", W_std " + std::to_string(bs) + " (16 samples, n=512)"});
  }

  bool ok = true;
  for (const auto& chk : checks) {
    print_check(log, chk);
    ok = ok && chk.pass;
  }
  return ok ? kExitOk : kExitNumeric;
}

}  // namespace dirac
