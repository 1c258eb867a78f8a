#include <catch_amalgamated.hpp>

#include "schro/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

using namespace schro;
using Catch::Approx;

namespace {

std::vector<Real> parse_column(const std::string& csv, std::size_t col) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<Real> out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() > col && !cells[col].empty() && cells[0] != "fitted_order") {
      out.push_back(std::stod(cells[col]));
    }
  }
  return out;
}

Experiment scalar_decay(Real rate) {
  std::map<std::string, std::string> sec{
      {"n", "1"}, {"A", std::to_string(-rate)}, {"u0", "1"}, {"T", "1"}};
  return experiment_from_section(sec);
}

int exit_code(const std::string& args) {
  const std::string cmd = std::string(SCHRO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("fractions and lists", "[harness][config]") {
  CHECK(parse_real("1/256") == 1.0 / 256.0);
  CHECK(parse_real(" 25 / 1024 ") == 25.0 / 1024.0);
  CHECK(parse_real("-3.5e-2") == -3.5e-2);
  CHECK_THROWS_AS(parse_real("abc"), ConfigError);
  CHECK_THROWS_AS(parse_real("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_real("2x"), ConfigError);
  CHECK(parse_index("1024") == 1024);
  CHECK_THROWS_AS(parse_index("3.5"), ConfigError);
  const auto v = parse_list("[1, -2; 3/4]");
  REQUIRE(v.size() == 3);
  CHECK(v[2] == 0.75);
}

TEST_CASE("sectioned config parsing", "[harness][config]") {
  std::istringstream in(
      "# comment\n"
      "experiment = maxwell-small # trailing\n"
      "; whole-line comment\n"
      "dt = 1/512\n"
      "[run]\n"
      "Np = 512\n"
      "[system]\n"
      "n = 2\n"
      "A = -1 0; 0 -2\n"
      "u0 = 1 1\n");
  const ConfigSections s = parse_config(in);
  CHECK(s.at("run").at("experiment") == "maxwell-small");
  CHECK(s.at("run").at("Np") == "512");
  const LoadedConfig c = load_config(s);
  CHECK(c.run.dt.value() == 1.0 / 512.0);
  CHECK(c.run.Np.value() == 512);
  REQUIRE(c.custom.has_value());
  CHECK(c.run.experiment == "custom");
  CHECK(c.custom->system.n == 2);
  CHECK(c.custom->system.matrix_at(0.0)(1, 1).real() == -2.0);

  std::istringstream bad_header("[run\nx = 1\n");
  CHECK_THROWS_AS(parse_config(bad_header), ConfigError);
  std::istringstream no_eq("dt 0.1\n");
  CHECK_THROWS_AS(parse_config(no_eq), ConfigError);
  std::istringstream unknown("[extra]\nx = 1\n");
  CHECK_THROWS_AS(load_config(parse_config(unknown)), ConfigError);

  RunConfig cfg;
  CHECK_THROWS_AS(apply_setting(cfg, "bogus", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "threads", "0"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "disc", "wavelet"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "scheme", "rk4"), ConfigError);
}

TEST_CASE("system section validation", "[harness][config]") {
  std::map<std::string, std::string> sec{{"n", "2"}, {"A", "1 2 3"}, {"u0", "1 1"}};
  CHECK_THROWS_AS(experiment_from_section(sec), DimensionError);
  sec["A"] = "1 0 0 1";
  sec["u0"] = "1";
  CHECK_THROWS_AS(experiment_from_section(sec), DimensionError);
  sec.erase("u0");
  CHECK_THROWS_AS(experiment_from_section(sec), ConfigError);
}

TEST_CASE("resolve rejects mismatched parameters", "[harness][config]") {
  const Experiment e = make_experiment("maxwell-small");
  RunConfig cfg;
  cfg.X = 80.0;
  CHECK_THROWS_AS(resolve(cfg, e), ConfigError);
  cfg = RunConfig{};
  cfg.disc = Discretization::ContinuousFourier;
  cfg.Np = 512;
  CHECK_THROWS_AS(resolve(cfg, e), ConfigError);
  cfg = RunConfig{};
  cfg.R = 3.0;
  CHECK_THROWS_AS(resolve(cfg, e), DomainError);
  cfg = RunConfig{};
  cfg.dt = 2.0;
  CHECK_THROWS_AS(resolve(cfg, e), ConfigError);
  cfg = RunConfig{};
  cfg.Np = 255;
  CHECK_THROWS_AS(resolve(cfg, e), ConfigError);
  cfg = RunConfig{};
  cfg.epsilon = 2.0;
  CHECK_THROWS_AS(resolve(cfg, e), InvalidAccuracyError);
  cfg = RunConfig{};
  cfg.disc = Discretization::ContinuousFourier;
  cfg.dxi = 0.3;
  CHECK_THROWS_AS(resolve(cfg, e), ConfigError);

  const ResolvedConfig rc = resolve(RunConfig{}, e);
  CHECK(rc.Np == e.recommended.Np);
  CHECK(rc.dt == e.recommended.dt);
  CHECK(rc.gamma.value() == e.recommended.gamma.value());
}

TEST_CASE("zero generator returns the initial data", "[harness]") {
  std::map<std::string, std::string> sec{
      {"n", "2"}, {"A", "0 0 0 0"}, {"u0", "1 -2"}, {"T", "1"}};
  const Experiment e = experiment_from_section(sec);
  RunConfig cfg;
  cfg.Np = 1024;
  cfg.piL = 12.0;
  cfg.dt = 0.1;
  const RunResult r = run(e, cfg);
  CHECK(r.p_diamond == 0.0);
  CHECK((r.u - e.system.u0).norm() < 1e-3 * e.system.u0.norm());
  CHECK(r.evolution.max_norm_drift < 1e-12);
  REQUIRE(r.measurement.has_value());
  CHECK(r.measurement->g >= 1.0);
}

TEST_CASE("constant source goes through the lift", "[harness]") {
  std::map<std::string, std::string> sec{
      {"n", "2"}, {"A", "-1 0.5 0 -2"}, {"u0", "1 0"}, {"b", "1 -1"}, {"T", "1"}};
  const Experiment e = experiment_from_section(sec);
  RunConfig cfg;
  cfg.Np = 2048;
  cfg.piL = 16.0;
  cfg.dt = 1e-2;
  const RunResult r = run(e, cfg);
  REQUIRE(r.point_error.has_value());
  CHECK(*r.point_error < 5e-3);
  REQUIRE(r.auxiliary_error.has_value());
  CHECK(*r.auxiliary_error < 5e-3);
  CHECK(r.p_diamond >= 1.0);
  CHECK(r.u.size() == 2);
}

TEST_CASE("continuous runs recover by point and integral", "[harness]") {
  const Experiment e = scalar_decay(1.0);
  RunConfig cfg;
  cfg.disc = Discretization::ContinuousFourier;
  cfg.X = 320.0;
  cfg.dxi = 5.0 / 64.0;
  cfg.dt = 0.05;
  const RunResult point = run(e, cfg);
  CHECK(*point.point_error < 1e-2);
  cfg.recovery = RecoveryMode::Integral;
  const RunResult integral = run(e, cfg);
  CHECK(*integral.point_error < 5e-2);
  CHECK(integral.xi_state.has_value());
}

TEST_CASE("CSV output is deterministic and round-trips", "[harness][csv]") {
  const std::vector<ScanRow> rows{{0.5, 1.0 / 3.0}, {1.0, 2e-17}, {1.5, 0.1}};
  const std::string a = scan_csv(rows), b = scan_csv(rows);
  CHECK(a == b);
  CHECK(a.rfind("p,rel_error\n", 0) == 0);
  const auto ps = parse_column(a, 0), es = parse_column(a, 1);
  REQUIRE(es.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(ps[i] == rows[i].first);
    CHECK(es[i] == rows[i].second);
  }
  CHECK(scan_csv({}) == "p,rel_error\n");

  ConvergenceReport rep;
  for (int k = 0; k < 3; ++k) {
    ConvergenceRow row;
    row.resolution = std::ldexp(1.0, -k);
    row.error = std::ldexp(1.0, -2 * k);
    rep.rows.push_back(row);
  }
  rep.fitted_order = fitted_order(rep.rows);
  const std::string csv = report_csv(rep);
  std::istringstream in(csv);
  std::string line;
  int lines = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++lines;
    last = line;
  }
  CHECK(lines == 5);
  CHECK(last.rfind("fitted_order,,", 0) == 0);
  CHECK(std::stod(last.substr(14)) == Approx(2.0).epsilon(1e-14));

  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "schro_scan_test.csv").string();
  emit_csv(rows, path);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == a);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_file("/nonexistent-dir/x.csv", a), ConfigError);
}

TEST_CASE("fitted order on a manufactured ladder", "[harness]") {
  std::vector<ConvergenceRow> rows;
  for (int k = 0; k < 4; ++k) {
    ConvergenceRow r;
    r.resolution = 0.1 * std::ldexp(1.0, -k);
    r.error = 7.0 * std::pow(r.resolution, 1.5);
    rows.push_back(r);
  }
  CHECK(fitted_order(rows) == Approx(1.5).epsilon(1e-12));
  CHECK_THROWS_AS(fitted_order({rows[0]}), ConfigError);
}

TEST_CASE("refinement study on scalar decay", "[harness][convergence]") {
  const Experiment e = scalar_decay(1.0);
  RunConfig cfg;
  cfg.Np = 256;
  cfg.piL = 16.0;
  cfg.dt = 0.05;
  const ConvergenceReport rep = convergence(e, cfg, 3);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[1].resolution == Approx(rep.rows[0].resolution / 2));
  CHECK(rep.fitted_order > 1.8);
  CHECK(rep.fitted_order < 2.2);
  for (const auto& r : rep.rows) CHECK(r.max_norm_drift < 1e-12);
  CHECK_THROWS_AS(convergence(e, cfg, 2), ConfigError);
}

TEST_CASE("command-line exit codes", "[harness][cli]") {
  CHECK(exit_code("solve --experiment maxwell-small --X 80") == 2);
  CHECK(exit_code("demo nonexistent") == 2);
  CHECK(exit_code("solve --experiment maxwell-small --R 5") == 2);
  CHECK(exit_code("solve --dt abc") == 2);
  CHECK(exit_code("frobnicate") != 0);
}
