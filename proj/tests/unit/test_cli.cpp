#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dirac/commands.hpp"
#include "dirac/config.hpp"
#include "dirac/csv.hpp"
#include "dirac/error.hpp"

using namespace dirac;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Config;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dirac1d_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DIRAC1D_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig small_disorder(const fs::path& out, std::size_t threads) {
  RunConfig c;
  c.n_points = 128;
  c.kind = "mass";
  c.strengths = {0.0, 3.0};
  c.samples = 3;
  c.t_star = 0.1;
  c.disorder_snapshots = 8;
  c.out = out.string();
  c.threads = threads;
  return c;
}

void check_same_files(const fs::path& a, const fs::path& b) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    REQUIRE(fs::exists(b / name));
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), name.string());
    ++count;
  }
  CHECK(count > 0);
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  c.n_points = 777;
  c.x_min = -1.25;
  c.x_max = 0.75;
  c.sigma = 0.1 / 3.0;
  c.k1 = -12.5;
  c.sigma0_im = 0.3;
  c.scenario = "custom";
  c.order = "fixed:12";
  c.interval = "paper";
  c.kind = "mass";
  c.strengths = {0.0, 1.0 / 3.0, 11.0};
  c.samples = 7;
  c.on_failure = "exclude";
  c.fit_weights = "std";
  c.seed = 0xFFFFFFFFFFFFFFFFull;
  const auto back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("config parsing errors") {
  CHECK(kind_of([] { parse_config("[grid]\nnodes_typo = 3\n"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_config("[grid]\nn_points = many\n"); }) == ErrorKind::Config);
  CHECK(parse_config("[run]\nseed = 5\n").seed == 5u);

  CHECK(kind_of([] { parse_order("fixed:-1"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_order("taylor"); }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_interval("somewhere"); }) == ErrorKind::Config);
  CHECK(parse_list("0, 1.5,3") == std::vector<double>{0.0, 1.5, 3.0});
  CHECK(kind_of([] { parse_list("1,x"); }) == ErrorKind::Config);

  RunConfig bad;
  bad.kind = "binary";
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::Config);
}

TEST_CASE("scenario presets") {
  RunConfig c;
  for (const char* s : {"static", "opposite", "parallel", "custom"}) {
    c.scenario = s;
    const auto sc = make_scenario(c);
    CHECK(sc.packet.sigma > 0.0);
    CHECK(sc.mass >= 0.0);
  }
  c.scenario = "sideways";
  CHECK(kind_of([&] { make_scenario(c); }) == ErrorKind::Config);
}

TEST_CASE("output lock is exclusive and released") {
  const auto dir = scratch("lock");
  {
    const OutputLock first(dir);
    CHECK(kind_of([&] { OutputLock second(dir); }) == ErrorKind::Config);
  }
  CHECK_NOTHROW(OutputLock{dir});
  CHECK(fs::is_empty(dir));
  fs::remove_all(dir);
}

TEST_CASE("disorder outputs are reproducible and carry their config") {
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  std::ostringstream log;
  CHECK(cmd_disorder(small_disorder(a, 1), log) == kExitOk);
  CHECK(cmd_disorder(small_disorder(b, 3), log) == kExitOk);
  check_same_files(a, b);

  const auto sweep = a / "disorder_mass_sweep.csv";
  REQUIRE(fs::exists(sweep));
  auto reloaded = load_config(sweep);
  auto expected = small_disorder(a, 1);
  reloaded.out = expected.out;
  reloaded.threads = expected.threads;
  CHECK(reloaded == expected);

  std::ifstream in(sweep);
  const auto table = read_csv(in);
  CHECK(table.column_values("s") == std::vector<double>{0.0, 3.0});
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("command line") {
  CHECK(run_cli("--help") == kExitOk);
  CHECK(run_cli("") == kExitConfig);
  CHECK(run_cli("disorder --no-such-flag") == kExitConfig);
  CHECK(run_cli("disorder --kind binary") == kExitConfig);
  CHECK(run_cli("fit /nonexistent/sweep.csv --out " + scratch("fit_missing").string()) == kExitConfig);

  const auto a = scratch("cli_a"), b = scratch("cli_b");
  const std::string common = " --grid-n 128 --kind potential --strengths 0,4 --samples 2 --t-star 0.1";
  REQUIRE(run_cli("disorder" + common + " --threads 1 --out " + a.string()) == kExitOk);
  REQUIRE(run_cli("disorder --config " + (a / "disorder_potential_sweep.csv").string() + " --threads 2 --out " +
                  b.string()) == kExitOk);
  check_same_files(a, b);

  const auto f = scratch("cli_fit");
  // two strengths cannot pin three parameters
  CHECK(run_cli("fit " + (a / "disorder_potential_sweep.csv").string() + " --out " + f.string()) == kExitFit);
  fs::remove_all(a);
  fs::remove_all(b);
  fs::remove_all(f);
  fs::remove_all(scratch("fit_missing"));
}
