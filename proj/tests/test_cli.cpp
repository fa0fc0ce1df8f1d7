#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "imcf/config.hpp"
#include "imcf/errors.hpp"
#include "imcf/io.hpp"

using namespace imcf;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "imcf_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(IMCF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kHomogeneousRun = R"(
[model]
name = "exprw"
lambda = 1.0
dim = 1

[grid]
shape = [64]

[initial]
kind = "constant"
u0 = 0.0

[flow]
t_max = 1.0
)";

struct CsvTrace {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvTrace read_trace(const fs::path& p) {
  CsvTrace t;
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string cell;
    if (t.columns.empty()) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  RunConfig cfg = parse_config_string(kHomogeneousRun);
  CHECK(cfg.model_name == "exprw");
  CHECK(cfg.dim == 1);
  CHECK(cfg.shape == std::vector<int>{64});
  CHECK(cfg.flow.t_max == 1.0);
  CHECK(cfg.flow.cfl == 0.5);
  CHECK(cfg.flow.integrator == Integrator::Rk2);
  CHECK(cfg.seed == 12345);
  CHECK(cfg.config_hash != 0);

  SpacetimeModel model = build_model(cfg);
  PeriodicGrid grid = build_grid(cfg, model);
  ScalarField u0 = build_initial(cfg, model, grid);
  CHECK(grid.npoints() == 64);
  for (double u : u0.v) CHECK(u == 0.0);
}

TEST_CASE("unknown keys are named with their location") {
  std::string text = std::string(kHomogeneousRun) + "\n[flw]\ncfl = 0.25\n";
  try {
    parse_config_string(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("flw.cfl") != std::string::npos);
    CHECK(msg.find("unknown key") != std::string::npos);
  }
}

TEST_CASE("all schema violations are reported together") {
  const char* text = R"(
[model]
name = "nosuchmodel"

[grid]
shape = [64]

[flow]
cfl = 0.0
)";
  try {
    parse_config_string(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("nosuchmodel") != std::string::npos);
    CHECK(msg.find("cfl") != std::string::npos);
  }
}

TEST_CASE("initial data that cannot be spacelike is rejected at parse time") {
  const char* text = R"(
[model]
name = "exprw"
lambda = 1.0
dim = 1

[grid]
shape = [64]

[initial]
kind = "fourier"
u0 = 0.0
amplitude = [2.0]
mode = [1]

[flow]
t_max = 1.0
)";
  // A sine of amplitude 2 on a 2 pi torus has |Du| up to 2 > 1.
  CHECK_THROWS_AS(parse_config_string(text), ConfigError);
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("null or timelike") != std::string::npos);
  }
}

TEST_CASE("fourier initial data evaluates the declared modes") {
  const char* text = R"(
[model]
name = "exprw"
lambda = 1.0
dim = 1

[grid]
shape = [64]

[initial]
kind = "fourier"
u0 = 0.5
amplitude = [0.1]
mode = [2]
phase = [0.25]

[flow]
t_max = 1.0
)";
  RunConfig cfg = parse_config_string(text);
  SpacetimeModel model = build_model(cfg);
  PeriodicGrid grid = build_grid(cfg, model);
  ScalarField u = build_initial(cfg, model, grid);
  std::vector<double> x(1);
  for (std::size_t p = 0; p < grid.npoints(); ++p) {
    grid.coords(p, x);
    double expect = 0.5 + 0.1 * std::sin(2.0 * x[0] + 0.25);
    CHECK(u[p] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("file-backed initial data round-trips exactly") {
  std::ostringstream vals;
  for (int i = 0; i < 64; ++i) vals << format_double(0.3 + 1e-3 * i) << "\n";
  std::string data_path = write_file("u0.txt", vals.str());
  std::string text = R"(
[model]
name = "exprw"
lambda = 1.0
dim = 1

[grid]
shape = [64]

[initial]
kind = "file"
file = ")" + data_path + R"("

[flow]
t_max = 1.0
)";
  RunConfig cfg = parse_config_string(text);
  SpacetimeModel model = build_model(cfg);
  PeriodicGrid grid = build_grid(cfg, model);
  ScalarField u = build_initial(cfg, model, grid);
  for (std::size_t p = 0; p < 64; ++p) CHECK(u[p] == 0.3 + 1e-3 * static_cast<double>(p));

  // Wrong sample count is an error.
  std::string short_path = write_file("u0_short.txt", "0.1\n0.2\n");
  RunConfig bad = cfg;
  bad.initial_file = short_path;
  CHECK_THROWS_AS(build_initial(bad, model, grid), ConfigError);
}

TEST_CASE("cli: homogeneous run exits cleanly and obeys the volume law") {
  std::string cfg_path = write_file("run.toml", kHomogeneousRun);
  fs::path out = scratch_dir() / "run_out";
  CHECK(run_cli("run " + cfg_path + " --output-dir " + out.string()) == 0);

  CsvTrace trace = read_trace(out / "trace.csv");
  REQUIRE(trace.columns.size() == 11);
  CHECK(trace.columns[0] == "t");
  CHECK(trace.columns[3] == "volume");
  REQUIRE(!trace.rows.empty());
  double vol0 = trace.rows.front()[3];
  double prev_t = -1.0;
  for (const auto& row : trace.rows) {
    CHECK(row[0] > prev_t);
    prev_t = row[0];
    CHECK(std::abs(row[3] / vol0 - std::exp(-row[0])) <= 1e-6);
  }
  CHECK(std::abs(trace.rows.back()[0] - 1.0) <= 1e-12);
}

TEST_CASE("cli: repeated runs are byte-identical") {
  std::string cfg_path = write_file("det.toml", kHomogeneousRun);
  fs::path a = scratch_dir() / "det_a", b = scratch_dir() / "det_b";
  CHECK(run_cli("run " + cfg_path + " --output-dir " + a.string()) == 0);
  CHECK(run_cli("run " + cfg_path + " --output-dir " + b.string()) == 0);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("cli: flowing a maximal slice is a precondition failure") {
  const char* text = R"(
[model]
name = "minkowski"
dim = 1
x0_min = 0.0
x0_max = 1.0

[grid]
shape = [32]

[initial]
kind = "constant"
u0 = 0.5

[flow]
t_max = 1.0
)";
  std::string cfg_path = write_file("mink_run.toml", text);
  fs::path out = scratch_dir() / "mink_out";
  CHECK(run_cli("run " + cfg_path + " --output-dir " + out.string()) == 4);
}

TEST_CASE("cli: malformed config is a usage failure") {
  std::string cfg_path = write_file("bad.toml", "[model]\nname = \"exprw\"\n[flw]\nx = 1\n");
  CHECK(run_cli("run " + cfg_path) == 2);
  CHECK(run_cli("run /nonexistent/nope.toml") == 2);
}

TEST_CASE("cli: hypothesis checks pass on curved models and fail on the flat slab") {
  const char* exprw_check = R"(
[model]
name = "exprw"
lambda = 1.0
dim = 1

[grid]
shape = [32]

[checks]
threshold = 5.0
)";
  std::string cfg_path = write_file("check_exprw.toml", exprw_check);
  fs::path out = scratch_dir() / "check_exprw_out";
  CHECK(run_cli("check " + cfg_path + " --output-dir " + out.string()) == 0);
  CHECK(fs::exists(out / "reports.jsonl"));

  const char* sads_check = R"(
[model]
name = "sads"
n = 1
Lambda = -1.0
m = 1.0
kappa = 0

[grid]
shape = [8, 8]

[checks]
threshold = 1.0
)";
  cfg_path = write_file("check_sads.toml", sads_check);
  out = scratch_dir() / "check_sads_out";
  CHECK(run_cli("check " + cfg_path + " --output-dir " + out.string()) == 0);

  const char* mink_check = R"(
[model]
name = "minkowski"
dim = 1
x0_min = 0.0
x0_max = 1.0

[grid]
shape = [32]
)";
  cfg_path = write_file("check_mink.toml", mink_check);
  out = scratch_dir() / "check_mink_out";
  CHECK(run_cli("check " + cfg_path + " --output-dir " + out.string()) == 1);
}

TEST_CASE("cli: oracle comparison accepts homogeneous runs only") {
  std::string cfg_path = write_file("oracle.toml", kHomogeneousRun);
  fs::path out = scratch_dir() / "oracle_out";
  CHECK(run_cli("oracle-compare " + cfg_path + " --output-dir " + out.string()) == 0);
  CHECK(fs::exists(out / "oracle_compare.csv"));

  const char* perturbed = R"(
[model]
name = "exprw"
lambda = 1.0
dim = 1

[grid]
shape = [64]

[initial]
kind = "fourier"
u0 = 0.0
amplitude = [0.1]
mode = [1]

[flow]
t_max = 1.0
)";
  cfg_path = write_file("oracle_bad.toml", perturbed);
  CHECK(run_cli("oracle-compare " + cfg_path + " --output-dir " + out.string()) == 4);
}

TEST_CASE("cli: lifespan bound on the homogeneous run") {
  const char* text = R"(
[model]
name = "exprw"
lambda = 1.0
dim = 1

[grid]
shape = [64]

[initial]
kind = "constant"
u0 = 0.0

[flow]
t_max = 2.5
)";
  std::string cfg_path = write_file("lifespan.toml", text);
  fs::path out = scratch_dir() / "lifespan_out";
  CHECK(run_cli("lifespan " + cfg_path + " --t 1.0 --output-dir " + out.string()) == 0);
  CHECK(fs::exists(out / "reports.jsonl"));
}
