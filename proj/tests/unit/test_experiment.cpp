#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rgbdsde/error.hpp"
#include "rgbdsde/experiment.hpp"

using namespace rgbdsde;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rgbdsde_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kRamp = R"({
  "seed": 11,
  "coefficients": {"family": "ramp"},
  "obstacle": {"family": "ramp"},
  "solver": {"N": 512, "M_inner": 10, "variant": "penalized", "penalty_n": 10},
  "expect": {"y_start_mean": {"value": 0.9000045, "tol": 1e-3},
             "skorokhod_residual": {"value": -0.085, "tol": 1e-3}}
})";

}  // namespace

TEST_CASE("defaults are filled") {
  auto s = parse_config(R"({"seed": 1})");
  CHECK(s.resolved["solver"]["degree"] == 2);
  CHECK(s.resolved["solver"]["M_inner"] == 4096);
  CHECK(s.resolved["solver"]["N"] == 64);
  CHECK(s.seed == 1);
  CHECK(s.digest.size() == 16);
}

TEST_CASE("config errors") {
  try {
    parse_config(R"({"seed": 1, "foo": 2})");
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "solver": {"foo": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"coefficients": {"family": "zero"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": 1, "coefficients": {"family": "nope"}})"), ConfigError);
  try {
    parse_config("{\n\"seed\": 1,\n\"solver\": {\"N\": }\n}");
    FAIL("expected parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_NOTHROW(parse_config(R"({"coefficients": {"family": "zero"}})", 5));
}

TEST_CASE("digest ignores key order and output location") {
  auto a = parse_config(R"({"seed": 3, "solver": {"N": 32, "degree": 1}, "coefficients": {"family": "zero"}})");
  auto b = parse_config(R"({"coefficients": {"family": "zero"}, "solver": {"degree": 1, "N": 32}, "seed": 3,
                            "output": "elsewhere"})");
  CHECK(a.digest == b.digest);
  auto c = parse_config(R"({"seed": 4, "solver": {"N": 32, "degree": 1}, "coefficients": {"family": "zero"}})");
  CHECK(a.digest != c.digest);
}

TEST_CASE("ramp config passes with closed-form comparisons") {
  auto spec = parse_config(kRamp);
  spec.output_dir = scratch("ramp");
  auto m = run_experiment(spec, Command::solve);
  CHECK(m.pass());
  CHECK(m.data["schema"] == 1);
  REQUIRE(m.data.contains("expectations"));
  CHECK(m.data["expectations"].size() == 2);
  CHECK(fs::exists(spec.output_dir / "solution.csv"));
  CHECK(fs::exists(spec.output_dir / "manifest.json"));
}

TEST_CASE("reruns are byte-identical apart from timings") {
  auto spec = parse_config(kRamp);
  const auto dir_a = scratch("rep_a"), dir_b = scratch("rep_b");
  spec.output_dir = dir_a;
  auto a = run_experiment(spec, Command::solve);
  spec.output_dir = dir_b;
  auto b = run_experiment(spec, Command::solve);
  const auto csv = slurp(dir_a / "solution.csv");
  CHECK(csv.size() > 0);
  CHECK(csv == slurp(dir_b / "solution.csv"));
  a.data.erase("timings");
  b.data.erase("timings");
  CHECK(a.data.dump() == b.data.dump());
}

TEST_CASE("oracle manifest reports the relative error") {
  auto spec = parse_config(R"({
    "seed": 2, "problem": "field",
    "coefficients": {"family": "heat_obstacle"},
    "diffusion": {"start": [0.5], "drift1": -0.2, "sigma": 0.5},
    "solver": {"N": 16, "M_inner": 400},
    "probes": [[0.5, 0.5]],
    "oracle": {"J": 40, "N_fd": 64}})");
  spec.output_dir = scratch("oracle");
  auto m = run_experiment(spec, Command::oracle);
  CHECK(m.data["status"] == "ok");
  CHECK(m.data["metrics"].contains("max_relative_error"));
  CHECK(fs::exists(spec.output_dir / "compare.json"));
  CHECK(fs::exists(spec.output_dir / "fd.csv"));
  CHECK(fs::exists(spec.output_dir / "field_aggregate.csv"));
}

TEST_CASE("module errors land in the manifest") {
  auto spec = parse_config(R"({"seed": 1, "coefficients": {"family": "zero"},
                               "obstacle": {"family": "constant", "params": {"level": 5}}})");
  spec.output_dir = scratch("err");
  auto m = run_experiment(spec, Command::solve);
  CHECK(m.data["status"] == "error");
  CHECK_FALSE(m.pass());
  CHECK(m.data["error"].get<std::string>().find("obstacle") != std::string::npos);
}

TEST_CASE("summaries") {
  nlohmann::json m1 = {{"digest", "a"}, {"seed", 1}, {"command", "solve"}, {"status", "ok"}, {"pass", true},
                       {"metrics", {{"penalty_n", 100}, {"y_start_mean", 0.99}}}};
  nlohmann::json m2 = {{"digest", "b"}, {"seed", 1}, {"command", "solve"}, {"status", "ok"}, {"pass", false},
                       {"metrics", {{"penalty_n", 10}, {"y_start_mean", 0.9}}}};
  auto one = summarize({m1});
  CHECK(one.rows.size() == 1);
  CHECK(one.rows[0][4].find("y_start_mean=0.99") != std::string::npos);
  CHECK(one.pass);
  auto two = summarize({m1, m2});
  CHECK_FALSE(two.pass);
  CHECK(two.rows[0][0] == "b");  // ordered by penalty index
  CHECK(two.to_csv().find("aggregate,fail") != std::string::npos);
  CHECK_THROWS_AS(summarize({}), ConfigError);
}
