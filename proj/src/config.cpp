#include "dirac/config.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dirac/csv.hpp"
#include "dirac/error.hpp"

namespace dirac {

namespace {

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::Config, key + ": not a number: '" + text + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::Config, key + ": not an unsigned integer: '" + text + "'");
  return v;
}

std::string join_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_number(values[i]);
  }
  return out;
}

// One binding per serialized key: section, key, writer, reader.
struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class T>
Field real(const char* section, const char* key, T RunConfig::*member) {
  return {section, key, [member](const RunConfig& c) { return format_number(c.*member); },
          [member, key](RunConfig& c, const std::string& v) { c.*member = to_double(key, v); }};
}

template <class T>
Field count(const char* section, const char* key, T RunConfig::*member) {
  return {section, key, [member](const RunConfig& c) { return std::to_string(c.*member); },
          [member, key](RunConfig& c, const std::string& v) { c.*member = static_cast<T>(to_u64(key, v)); }};
}

Field text(const char* section, const char* key, std::string RunConfig::*member) {
  return {section, key, [member](const RunConfig& c) { return c.*member; },
          [member](RunConfig& c, const std::string& v) { c.*member = v; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      count("grid", "n_points", &RunConfig::n_points),
      real("grid", "x_min", &RunConfig::x_min),
      real("grid", "x_max", &RunConfig::x_max),
      real("packet", "sigma", &RunConfig::sigma),
      real("packet", "k1", &RunConfig::k1),
      real("packet", "k2", &RunConfig::k2),
      real("packet", "sigma0_re", &RunConfig::sigma0_re),
      real("packet", "sigma0_im", &RunConfig::sigma0_im),
      real("packet", "chi0_re", &RunConfig::chi0_re),
      real("packet", "chi0_im", &RunConfig::chi0_im),
      real("packet", "x_center", &RunConfig::x_center),
      text("free", "scenario", &RunConfig::scenario),
      real("free", "mass", &RunConfig::mass),
      real("free", "t_total", &RunConfig::t_total),
      count("free", "snapshots", &RunConfig::snapshots),
      real("free", "quad_window", &RunConfig::quad_window),
      count("free", "quad_nodes", &RunConfig::quad_nodes),
      text("propagator", "order", &RunConfig::order),
      real("propagator", "dt", &RunConfig::dt),
      real("propagator", "max_a", &RunConfig::max_a),
      text("propagator", "interval", &RunConfig::interval),
      real("propagator", "margin", &RunConfig::margin),
      text("disorder", "kind", &RunConfig::kind),
      {"disorder", "strengths", [](const RunConfig& c) { return join_list(c.strengths); },
       [](RunConfig& c, const std::string& v) { c.strengths = parse_list(v); }},
      count("disorder", "samples", &RunConfig::samples),
      real("disorder", "t_star", &RunConfig::t_star),
      count("disorder", "snapshots", &RunConfig::disorder_snapshots),
      real("disorder", "sigma", &RunConfig::disorder_sigma),
      real("disorder", "mean_mass", &RunConfig::mean_mass),
      real("disorder", "mean_potential", &RunConfig::mean_potential),
      text("disorder", "on_failure", &RunConfig::on_failure),
      text("fit", "weights", &RunConfig::fit_weights),
      real("analytic", "sigma", &RunConfig::analytic_sigma),
      real("analytic", "k0", &RunConfig::analytic_k0),
      real("analytic", "t_max", &RunConfig::analytic_t_max),
      real("analytic", "m_max", &RunConfig::analytic_m_max),
      count("run", "seed", &RunConfig::seed),
  };
  return table;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) out.push_back(to_double("list", token));
    token.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') flush();
    else token += ch;
  }
  flush();
  return out;
}

OrderPolicy parse_order(const std::string& text) {
  if (text == "paper") return OrderPolicy::paper();
  if (text == "auto") return OrderPolicy::automatic();
  if (text.rfind("auto:", 0) == 0) {
    const double tol = to_double("order", text.substr(5));
    if (!(tol > 0.0)) throw Error(ErrorKind::Config, "order tolerance must be positive");
    return OrderPolicy::automatic(tol);
  }
  if (text.rfind("fixed:", 0) == 0) return OrderPolicy::fixed(to_u64("order", text.substr(6)));
  throw Error(ErrorKind::Config, "order must be auto[:TOL], fixed:K or paper, got '" + text + "'");
}

IntervalSource parse_interval(const std::string& text) {
  if (text == "lattice") return IntervalSource::Lattice;
  if (text == "paper") return IntervalSource::Paper;
  throw Error(ErrorKind::Config, "interval must be 'lattice' or 'paper', got '" + text + "'");
}

void RunConfig::validate() const {
  if (n_points < Grid1D::kMinPoints) throw Error(ErrorKind::Config, "grid.n_points must be >= 8");
  if (!(x_max > x_min)) throw Error(ErrorKind::Config, "grid requires x_min < x_max");
  if (scenario != "static" && scenario != "opposite" && scenario != "parallel" && scenario != "custom")
    throw Error(ErrorKind::Config, "scenario must be static, opposite, parallel or custom");
  if (!(t_total >= 0.0)) throw Error(ErrorKind::Config, "free.t_total must be >= 0");
  if (snapshots == 0 || disorder_snapshots == 0) throw Error(ErrorKind::Config, "snapshot counts must be >= 1");
  parse_order(order);
  parse_interval(interval);
  parse_disorder_kind(kind);
  if (on_failure != "abort" && on_failure != "exclude") throw Error(ErrorKind::Config, "on_failure must be abort or exclude");
  if (fit_weights != "sem" && fit_weights != "std") throw Error(ErrorKind::Config, "fit.weights must be sem or std");
  if (!(dt >= 0.0) || !(max_a > 0.0) || !(margin >= 0.0)) throw Error(ErrorKind::Config, "invalid propagator step settings");
  if (samples == 0) throw Error(ErrorKind::Config, "disorder.samples must be >= 1");
  if (!(t_star > 0.0)) throw Error(ErrorKind::Config, "disorder.t_star must be positive");
  if (!(disorder_sigma > 0.0) || !(sigma > 0.0) || !(analytic_sigma > 0.0))
    throw Error(ErrorKind::Config, "packet widths must be positive");
  if (quad_nodes < 3) throw Error(ErrorKind::Config, "free.quad_nodes must be >= 3");
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
  return out.str();
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::map<std::string, const Field*> index;
  for (const auto& f : fields()) index[std::string(f.section) + "." + f.key] = &f;

  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw Error(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const auto name = item.fullname();
    if (name == "meta.code_version") continue;
    const auto it = index.find(name);
    if (it == index.end()) throw Error(ErrorKind::Config, "unknown config key '" + name + "'");
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    it->second->set(base, value);
  }
  base.validate();
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config '" + path.string() + "'");
  std::string line;
  std::string body;
  bool first = true;
  bool header_mode = false;
  while (std::getline(in, line)) {
    if (first) header_mode = !line.empty() && line[0] == '#';
    first = false;
    if (header_mode) {
      if (line.empty() || line[0] != '#') break;
      body += line.size() >= 2 && line[1] == ' ' ? line.substr(2) : line.substr(1);
    } else {
      body += line;
    }
    body += '\n';
  }
  return parse_config(body, std::move(base));
}

std::string config_header(const RunConfig& config) {
  std::string text = "[meta]\ncode_version = " + std::string(kCodeVersion) + "\n\n" + serialize_config(config);
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out += line.empty() ? "#\n" : "# " + line + "\n";
  return out;
}

Grid1D make_grid(const RunConfig& config) { return Grid1D(config.x_min, config.x_max, config.n_points); }

PropagationOptions make_propagation_options(const RunConfig& config) {
  PropagationOptions opts;
  opts.interval_source = parse_interval(config.interval);
  opts.margin = config.margin;
  if (config.dt > 0.0) opts.dt = config.dt;
  opts.max_a = config.max_a;
  return opts;
}

EnsembleSetup make_ensemble_setup(const RunConfig& config) {
  EnsembleSetup setup;
  setup.grid = make_grid(config);
  setup.initial = GaussianSpec{config.disorder_sigma};
  setup.initial.x_center = config.x_center;
  setup.policy = parse_order(config.order);
  setup.schedule = Schedule{config.t_star, config.disorder_snapshots};
  setup.propagation = make_propagation_options(config);
  setup.threads = config.threads;
  setup.failure = config.on_failure == "abort" ? FailurePolicy::Abort : FailurePolicy::Exclude;
  return setup;
}

FreeScenario make_scenario(const RunConfig& config) {
  FreeScenario sc;
  sc.packet.sigma = 0.1;
  if (config.scenario == "static") {
    sc.mass = 30.0;
  } else if (config.scenario == "opposite") {
    sc.packet.k1 = sc.packet.k2 = 10.0;
    sc.mass = 30.0;
  } else if (config.scenario == "parallel") {
    sc.packet.k1 = 10.0;
    sc.packet.k2 = -10.0;
    sc.mass = 50.0;
  } else if (config.scenario == "custom") {
    sc.packet.sigma = config.sigma;
    sc.packet.k1 = config.k1;
    sc.packet.k2 = config.k2;
    sc.packet.sigma0 = {config.sigma0_re, config.sigma0_im};
    sc.packet.chi0 = {config.chi0_re, config.chi0_im};
    sc.packet.x_center = config.x_center;
    sc.mass = config.mass;
  } else {
    throw Error(ErrorKind::Config, "unknown scenario '" + config.scenario + "'");
  }
  return sc;
}

OutputLock::OutputLock(const std::filesystem::path& dir) : path_(dir / ".dirac1d.lock") {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot create output directory '" + dir.string() + "'");
  std::FILE* f = std::fopen(path_.c_str(), "wx");
  if (!f) throw Error(ErrorKind::Config, "output directory '" + dir.string() + "' is locked by another run");
  std::fclose(f);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

}  // namespace dirac
