#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "cymc/experiment.hpp"
#include "cymc/io.hpp"

using namespace cymc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_timestamp(std::string text) {
  return std::regex_replace(text, std::regex("\"timestamp\": \"[^\"]*\""), "\"timestamp\": \"\"");
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("cymc-test-" + name);
  fs::remove_all(dir);
  return dir;
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("shortest round-trip double formatting") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 5.0, 123456.789, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("atomic writes produce the full content") {
  fs::path dir = fresh_dir("io");
  fs::create_directories(dir);
  write_text_atomic(dir / "x.txt", "hello\nworld\n");
  CHECK(slurp(dir / "x.txt") == "hello\nworld\n");
  CHECK_FALSE(fs::exists(dir / "x.txt.tmp"));
}

TEST_CASE("config parsing applies defaults and validates") {
  Json doc = Json::parse(R"({"mode":"run","preset":"toy1d-equal"})");
  ExperimentConfig c = parse_experiment_config(doc);
  CHECK(c.run.seed == 0);
  CHECK(c.marginal_bins == 10);
  CHECK(c.run.schedule.floor_value == doctest::Approx(1e-3));
  CHECK(c.replicas == 1);
}

TEST_CASE("config errors carry the JSON location") {
  auto expect_error = [](const std::string& text, const std::string& where) {
    try {
      parse_experiment_config(Json::parse(text));
      FAIL_CHECK("expected a config error for ", text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(where) != std::string::npos);
    }
  };
  expect_error(R"({"mode":"banana"})", "/mode");
  expect_error(R"({"mode":"run"})", "/preset");
  expect_error(R"({"mode":"run","preset":"toy1d-equal","marginal_bins":0})", "/marginal_bins");
  expect_error(R"({"mode":"run","preset":"toy1d-equal","replicas":0})", "/replicas");
  expect_error(R"({"mode":"run","preset":"toy1d-equal","run":{"cycles":"many"}})", "/run/cycles");
  expect_error(R"({"mode":"run","preset":"toy1d-equal","run":{"proposal":{"family":"levy"}}})",
               "/run/proposal/family");
  expect_error(R"({"mode":"run","target":{"weights":[1.0],"means":[[0.0]]}})", "/target");
  expect_error(R"({"mode":"spectral","spectral":{"grid_points":1}})", "/spectral/grid_points");
  expect_error(R"({"mode":"theorem2","theorem2":{"l2":128}})", "/theorem2/l2");
  expect_error(R"({"mode":"lyapunov","lyapunov":{"s_values":[-1.0]}})", "/lyapunov/s_values");
}

TEST_CASE("custom targets parse into validated mixtures") {
  Json doc = Json::parse(R"({
    "mode":"run",
    "target":{"weights":[0.25,0.75],"means":[[0.0],[3.0]],"variances":[1.0,0.5],
              "domain":{"lower":[-10.0],"upper":[10.0]}}
  })");
  ExperimentConfig c = parse_experiment_config(doc);
  REQUIRE(c.custom_target.has_value());
  CHECK(c.custom_target->components.size() == 2);
  CHECK(c.custom_target->components[1].mean[0] == 3.0);
  CHECK(c.custom_target->domain->upper[0] == 10.0);
}

TEST_CASE("two-mode lab target matches its construction") {
  Target t = two_mode_target(0.05, 0.5, -2.0, 2.0);
  CHECK(t.components[0].mean[0] == -1.0);
  CHECK(t.components[1].mean[0] == 1.0);
  CHECK(t.components[0].variance == doctest::Approx(0.0025));
  CHECK(t.components[1].variance == doctest::Approx(0.000625));
}

TEST_CASE("samples CSV layout") {
  std::vector<Vector> samples(2, Vector(2));
  samples[0] << 1.5, -2.0;
  samples[1] << 0.25, 4.0;
  CHECK(samples_csv(samples) == "cycle,dim_0,dim_1\n1,1.5,-2\n2,0.25,4\n");
}

TEST_CASE("resolved config survives a parse round trip") {
  ExperimentConfig c = reproduce_config("grid2d-unequal", 9, false);
  ExperimentConfig back = parse_experiment_config(resolved_config_json(c));
  CHECK(back.mode == c.mode);
  CHECK(back.preset == c.preset);
  CHECK(back.run.seed == 9);
  CHECK(back.run.cycles == c.run.cycles);
  CHECK(back.run.schedule.floor_value == c.run.schedule.floor_value);
  CHECK(back.run.proposal.temperature_exponent == c.run.proposal.temperature_exponent);
  CHECK(back.run.init.kind == InitSpec::Kind::UniformBox);
  CHECK(back.mode_radius == c.mode_radius);
}

TEST_CASE("reproduce names map to the right experiment modes") {
  CHECK(reproduce_config("toy1d-equal", 0, false).mode == "run");
  CHECK(reproduce_config("spectral-thm1", 0, false).mode == "spectral");
  CHECK(reproduce_config("theorem2-demo", 0, false).mode == "theorem2");
  CHECK(reproduce_config("lyapunov-demo", 0, false).mode == "lyapunov");
  CHECK(reproduce_config("toy1d-equal", 0, true).run.cycles == 1000);
  CHECK_THROWS_AS(reproduce_config("toy3d", 0, false), ConfigError);
}

TEST_CASE("run reports are deterministic up to the timestamp") {
  Json doc = Json::parse(R"({
    "mode":"run","preset":"toy1d-equal","seed":4,"marginal_bins":4,
    "run":{"cycles":40,"cycle_length":100,
           "proposal":{"base_scale":0.25,"temperature_exponent":1.0},
           "init":{"kind":"gaussian","mean":[0.0],"variance":1.0}}
  })");
  ExperimentConfig c = parse_experiment_config(doc);
  fs::path a = fresh_dir("det-a"), b = fresh_dir("det-b");
  c.out_dir = a.string();
  execute(c);
  c.out_dir = b.string();
  execute(c);
  CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
  CHECK(slurp(a / "weights.csv") == slurp(b / "weights.csv"));
  CHECK(strip_timestamp(slurp(a / "report.json")) != "");
  CHECK(strip_timestamp(slurp(a / "report.json")) ==
        strip_timestamp(slurp(b / "report.json")));
  Json report = Json::parse(slurp(a / "report.json"));
  CHECK(report["config"]["seed"] == 4);
  CHECK(report["rng_algorithm"] == "mt19937_64+polar");
  CHECK(report["results"]["weights"]["weights"].size() == 2);
  CHECK(fs::exists(a / "marginal_mode0.csv"));
  CHECK(fs::exists(a / "marginal_mode1.csv"));
}

TEST_CASE("spectral reports expose the per-step quantities") {
  ExperimentConfig c;
  c.mode = "spectral";
  c.spectral.preset = "toy1d-equal";
  c.spectral.grid_points = 12;
  c.spectral.neighbor_window = 2;
  c.spectral.cycle_length = 8;
  c.spectral.cycles = 2;
  c.spectral.scaling_lengths = {};
  fs::path dir = fresh_dir("spec");
  c.out_dir = dir.string();
  Json report = execute(c);
  CHECK(report["results"]["alpha"].size() == 8);
  CHECK(report["results"]["lambda"].size() == 8);
  CHECK(report["results"]["recursion_ok"] == true);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "spectral.csv"));
  std::string traj = slurp(dir / "trajectory.csv");
  CHECK(traj.rfind("step,tv,var,var_bound\n", 0) == 0);
}

TEST_CASE("unknown reproduce preset fails before any experiment work") {
  ExperimentConfig c;
  c.mode = "reproduce";
  c.preset = "toy9d-equal";
  c.out_dir = fresh_dir("bad").string();
  CHECK_THROWS_AS(execute(c), ConfigError);
}

} // TEST_SUITE
