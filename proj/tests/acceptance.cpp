// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rgbdsde/catalog.hpp"
#include "rgbdsde/experiment.hpp"
#include "rgbdsde/properties.hpp"

using namespace rgbdsde;
namespace fs = std::filesystem;
using nlohmann::json;

#ifndef RGBDSDE_CONFIG_DIR
#define RGBDSDE_CONFIG_DIR "configs"
#endif

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SolverConfig deterministic(std::size_t N, std::size_t M = 10) {
  SolverConfig c;
  c.grid = make_grid(1.0, N);
  c.m_inner = M;
  c.seed = 1;
  return c;
}

Problem ramp() { return Problem{catalog::coefficients("ramp", {}), catalog::obstacle("ramp", {}), std::nullopt}; }

Problem standard_field(ObstacleSpec obstacle) {
  Problem p{catalog::coefficients("standard_stochastic", {}), std::move(obstacle), std::nullopt};
  p.forward = ForwardModel{Domain::interval(0, 1), linear_diffusion({0.5}, 0.0, -0.2, 0.5)};
  return p;
}

Problem shifted(Problem p, double delta) {
  p.coeffs.terminal = [base = p.coeffs.terminal, delta](PointView x) { return base(x) + delta; };
  return p;
}

ExperimentSpec load(const std::string& name) {
  return load_config(fs::path(RGBDSDE_CONFIG_DIR) / name);
}

Outcome ac1() {
  auto p = ramp();
  auto cfg = deterministic(512);
  auto sol = solve_penalized(p, 10, sample_paths_for(p, cfg), cfg);
  const double y = sol.y_mean(0, 0), err = std::abs(y - 0.9000045);
  return {err <= 1e-3, "Y(1)=" + fmt("%.7f", y) + " |err|=" + fmt("%.2e", err)};
}

Outcome ac2() {
  auto p = ramp();
  auto cfg = deterministic(512);
  auto sol = solve_reflected(p, sample_paths_for(p, cfg), cfg);
  double worst = 0.0, min_gap = INFINITY, complementarity = 0.0;
  for (std::size_t m = 0; m < sol.inner; ++m)
    for (std::size_t i = 0; i <= 512; ++i) {
      worst = std::max(worst, std::abs(sol.y(0, m, i) - cfg.grid.remaining(i)));
      min_gap = std::min(min_gap, sol.Y[sol.node(0, m, i)] - sol.S[sol.node(0, m, i)]);
      if (i < 512) complementarity += (sol.y(0, m, i) - sol.S[sol.node(0, m, i)]) * sol.dK[sol.step(0, m, i)];
    }
  const double kerr = std::abs(sol.k_total(0, 0) - 1.0);
  const bool ok = worst <= 1e-12 && kerr <= 1e-12 && complementarity == 0.0 && min_gap >= 0.0;
  return {ok, "max|Y-t|=" + fmt("%.1e", worst) + " |K-1|=" + fmt("%.1e", kerr) + " sum(Y-S)dK=" +
                  fmt("%g", complementarity) + " min(Y-S)=" + fmt("%g", min_gap)};
}

Outcome ac3() {
  std::size_t checks = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    json params = {{"fy", -1.0 + 1.5 * u(rng)}, {"gy", -0.4 + 0.8 * u(rng)}};
    Problem p{catalog::coefficients("standard_stochastic", params), ObstacleSpec::none(), std::nullopt};
    p.forward = ForwardModel{Domain::interval(0, 1),
                             linear_diffusion({0.2 + 0.6 * u(rng)}, 0.0, -0.5 + u(rng), 0.2 + 0.8 * u(rng))};
    SolverConfig cfg;
    cfg.grid = make_grid(1.0, 32);
    cfg.m_inner = 1000;
    cfg.m_outer = 8;
    cfg.seed = 3000 + seed;
    cfg.threads = 4;
    for (double delta : {0.1, 1.0}) {
      ++checks;
      violations += !comparison_check(p, shifted(p, delta), cfg).pass;
    }
  }
  // Deterministic sub-suite: exact ordering at every node, closed-form gaps.
  bool exact = true;
  for (double fy : {-1.0, -0.3, 0.0, 0.5}) {
    Problem p{catalog::coefficients("affine", {{"fy", fy}, {"f0", 0.2}, {"xi0", -0.3}}), ObstacleSpec::none(),
              std::nullopt};
    for (double delta : {0.1, 1.0}) exact = exact && comparison_check(p, shifted(p, delta), deterministic(256)).worst_margin >= 0.0;
  }
  Problem lin{catalog::coefficients("linear", {{"fy", -1.0}}), ObstacleSpec::none(), std::nullopt};
  auto r = comparison_check(lin, shifted(lin, 1.0), deterministic(std::size_t{1} << 18));
  const double gap_err = std::abs(r.details["gap_at_start"].get<double>() - std::exp(-1.0));
  exact = exact && r.worst_margin >= 0.0 && gap_err <= 1e-6;
  return {violations == 0 && exact, std::to_string(violations) + "/" + std::to_string(checks) +
                                        " stochastic violations; deterministic exact=" + (exact ? "yes" : "no") +
                                        " |gap-e^-1|=" + fmt("%.1e", gap_err)};
}

Outcome ac4() {
  const std::vector<std::size_t> ns{1, 10, 100};
  bool exact = penalization_monotone_check(ramp(), ns, deterministic(512)).worst_margin >= 0.0;
  Problem decay{catalog::coefficients("affine", {{"fy", -1.0}, {"xi0", 1.0}}),
                catalog::obstacle("constant", {{"level", 0.8}}), std::nullopt};
  exact = exact && penalization_monotone_check(decay, ns, deterministic(256)).worst_margin >= 0.0;
  SolverConfig cfg;
  cfg.grid = make_grid(1.0, 64);
  cfg.m_inner = 2000;
  cfg.m_outer = 8;
  cfg.seed = 4001;
  cfg.threads = 4;
  auto r = penalization_monotone_check(standard_field(catalog::obstacle("ramp", {{"slope", 0.9}, {"offset", 0.1}})), ns, cfg);
  return {exact && r.pass, std::string("deterministic exact=") + (exact ? "yes" : "no") + " stochastic margin=" +
                               fmt("%.2e", r.worst_margin) + " tol=" + fmt("%.2e", r.tolerance)};
}

Outcome ac5() {
  auto spec = load("oracle_heat.json");
  spec.threads = 4;
  const auto prob = build_field_problem(spec);
  const auto table = evaluate_field(prob, build_probes(spec), build_solver_config(spec));
  const auto fd = solve_obstacle_pde_1d(prob.coeffs, prob.obstacle, prob.diffusion, make_mesh(0, 1, 200, 1.0, 256));
  const auto err = compare_mc_fd(table, fd);
  return {err.max_rel_error <= 0.05, "max rel error " + fmt("%.4f", err.max_rel_error) + " of FD range " +
                                         fmt("%.4f", err.fd_range)};
}

Outcome ac6() {
  auto p = ramp();
  auto cfg = deterministic(512);
  auto noise = sample_paths_for(p, cfg);
  const double r10 = skorokhod_residual(solve_penalized(p, 10, noise, cfg));
  const double r20 = skorokhod_residual(solve_penalized(p, 20, noise, cfg));
  const double ratio = std::abs(r20) / std::abs(r10);
  return {std::abs(r10 + 0.085) <= 1e-3 && ratio >= 0.35 && ratio <= 0.65,
          "r(10)=" + fmt("%.5f", r10) + " r(20)=" + fmt("%.5f", r20) + " ratio=" + fmt("%.3f", ratio)};
}

Outcome ac7() {
  auto spec = load("energy_standard.json");
  spec.threads = 4;
  const std::vector<std::size_t> ns{1, 10, 100, 1000};
  auto r = energy_bound_check(build_problem(spec), ns, 1.0, build_solver_config(spec));
  const auto& rows = r.details["energies"];
  return {r.pass, "totals " + fmt("%.4f", rows[2]["total"].get<double>()) + " -> " +
                      fmt("%.4f", rows[3]["total"].get<double>()) + " rel change " +
                      fmt("%.4f", r.details["plateau_relative_change"].get<double>())};
}

Outcome ac8() {
  auto spec = load("picard_contraction.json");
  spec.threads = 4;
  auto problem = build_problem(spec);
  auto cfg = build_solver_config(spec);
  auto noise = sample_paths_for(problem, cfg);
  auto res = picard_solve(problem, noise, cfg);
  bool decreasing = res.deltas.size() >= 2;
  double worst_ratio = 0.0;
  for (std::size_t k = 1; k < res.deltas.size(); ++k) {
    decreasing = decreasing && res.deltas[k] < res.deltas[k - 1];
    worst_ratio = std::max(worst_ratio, res.deltas[k] / res.deltas[k - 1]);
  }
  // Same problem with g independent of (y, z).
  Problem flat = problem;
  flat.coeffs.g = [](double t, PointView, double, PointView, std::span<double> out) { out[0] = 0.3 * (1.0 - t); };
  flat.coeffs.g_depends_on_yz = false;
  SolverConfig tight = cfg;
  tight.picard_tol = 1e-12;
  auto one = picard_solve(flat, noise, tight);
  const double second = one.deltas.size() >= 2 ? one.deltas[1] : INFINITY;
  return {decreasing && worst_ratio < 0.9 && second <= 1e-12,
          std::to_string(res.deltas.size()) + " iterations, worst ratio " + fmt("%.3f", worst_ratio) +
              ", flat-g second delta " + fmt("%.1e", second)};
}

Outcome ac9() {
  auto grid = make_grid(1.0, 64);
  auto noise = sample_paths(grid, 1, 1, 4, 1, 9);
  auto pinned = simulate_reflected(linear_diffusion({0.25}, -1.0, 0.0, 0.0), Domain::interval(0, 1), grid, noise);
  const double a = pinned.A_total[0];
  auto bm_noise = sample_paths(grid, 1, 1, 4096, 1, 9001);
  auto bm = simulate_reflected(linear_diffusion({0.5}, 0.0, 0.0, 1.0), Domain::interval(0, 1), grid, bm_noise, 4);
  const int powers[] = {1, 2};
  auto stats = local_time_moments(bm, 1.0, powers);
  const bool ok = std::abs(a - 0.75) <= grid.dt && !stats.overflow && std::isfinite(stats.exp_moment);
  return {ok, "A_total=" + fmt("%.6f", a) + " E[e^A]=" + fmt("%.4f", stats.exp_moment) +
                  (stats.overflow ? " overflow" : " no overflow")};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome ac10() {
  const std::vector<std::pair<std::string, Command>> runs{
      {"ramp_penalized.json", Command::solve},      {"ramp_reflected.json", Command::solve},
      {"pinned_field.json", Command::field},        {"oracle_heat.json", Command::oracle},
      {"energy_standard.json", Command::properties}, {"picard_contraction.json", Command::solve},
      {"monotone_stochastic.json", Command::properties}, {"comparison_stochastic.json", Command::properties}};
  const fs::path root = fs::temp_directory_path() / "rgbdsde_acceptance_repro";
  fs::remove_all(root);
  std::size_t files = 0, mismatches = 0;
  bool all_pass = true;
  for (const auto& [name, cmd] : runs) {
    auto spec = load(name);
    for (int rep = 0; rep < 2; ++rep) {
      spec.output_dir = root / (name + "." + std::to_string(rep));
      spec.threads = rep == 0 ? 1 : 4;
      all_pass = all_pass && run_experiment(spec, cmd).pass();
    }
    for (const auto& entry : fs::directory_iterator(root / (name + ".0"))) {
      const auto other = root / (name + ".1") / entry.path().filename();
      ++files;
      if (entry.path().filename() == "manifest.json") {
        auto a = json::parse(slurp(entry.path())), b = json::parse(slurp(other));
        a.erase("timings");
        b.erase("timings");
        mismatches += a.dump() != b.dump();
      } else {
        mismatches += slurp(entry.path()) != slurp(other);
      }
    }
  }
  fs::remove_all(root);
  return {mismatches == 0 && all_pass, std::to_string(files) + " artifacts compared across thread counts, " +
                                           std::to_string(mismatches) + " differ; all runs pass=" +
                                           (all_pass ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "penalized ramp closed form", 1, ac1},
      {2, "reflected ramp exactness", 1, ac2},
      {3, "comparison theorem", 120, ac3},
      {4, "monotone penalization", 120, ac4},
      {5, "field vs finite-difference oracle", 300, ac5},
      {6, "Skorokhod residual decay", 1, ac6},
      {7, "energy plateau", 300, ac7},
      {8, "Picard contraction", 60, ac8},
      {9, "boundary local time", 30, ac9},
      {10, "reproducibility", 600, ac10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && s < c.budget_s;
    failed += !pass;
    std::printf("AC%-2d %s  %-34s %s [%.2fs / %.0fs]\n", c.id, pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), s,
                c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
