#include <doctest.h>

#include <cmath>
#include <vector>

#include "rgbdsde/catalog.hpp"
#include "rgbdsde/error.hpp"
#include "rgbdsde/properties.hpp"

using namespace rgbdsde;

namespace {

SolverConfig det(std::size_t N) {
  SolverConfig c;
  c.grid = make_grid(1.0, N);
  c.m_inner = 10;
  c.seed = 3;
  return c;
}

Problem ramp() { return Problem{catalog::coefficients("ramp", {}), catalog::obstacle("ramp", {}), std::nullopt}; }

Problem stochastic() {
  Problem p{catalog::coefficients("standard_stochastic", {}), catalog::obstacle("ramp", {{"slope", 0.9}, {"offset", 0.1}}),
            std::nullopt};
  p.forward = ForwardModel{Domain::interval(0, 1), linear_diffusion({0.5}, 0.0, -0.2, 0.5)};
  return p;
}

Problem shifted(Problem p, double delta) {
  p.coeffs.terminal = [base = p.coeffs.terminal, delta](PointView x) { return base(x) + delta; };
  return p;
}

}  // namespace

TEST_CASE("jackknife of the mean equals the classical standard error") {
  std::vector<double> v{1.0, 2.0, 4.0, 7.0};
  double mean = 3.5, ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  CHECK(jackknife_se(v) == doctest::Approx(std::sqrt(ss / 3.0 / 4.0)));
  std::vector<double> one{5.0};
  CHECK(jackknife_se(one) == 0.0);
}

TEST_CASE("comparison: y-independent driver shifts by exactly delta") {
  Problem base{catalog::coefficients("affine", {{"f0", 0.4}, {"xi0", 0.2}}), ObstacleSpec::none(), std::nullopt};
  auto r = comparison_check(base, shifted(base, 1.0), det(32));
  CHECK(r.pass);
  CHECK(r.worst_margin == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.details["gap_at_start"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("comparison: linear ODE gap e^{-t}") {
  Problem base{catalog::coefficients("linear", {{"fy", -1.0}}), ObstacleSpec::none(), std::nullopt};
  auto cfg = det(std::size_t{1} << 18);
  auto r = comparison_check(base, shifted(base, 1.0), cfg);
  CHECK(r.pass);
  CHECK(std::abs(r.details["gap_at_start"].get<double>() - std::exp(-1.0)) <= 1e-6);
}

TEST_CASE("comparison: violated ordering is refused") {
  Problem base{catalog::coefficients("affine", {{"f0", 0.0}}), ObstacleSpec::none(), std::nullopt};
  Problem bad = base;
  bad.coeffs.f = [](double, PointView, double, PointView) { return -1.0; };
  CHECK_THROWS_AS(comparison_check(base, bad, det(8)), PreconditionError);
}

TEST_CASE("comparison: stochastic config within tolerance") {
  auto p = stochastic();
  p.obstacle = ObstacleSpec::none();
  auto cfg = det(32);
  cfg.m_inner = 500;
  cfg.m_outer = 8;
  auto r = comparison_check(p, shifted(p, 0.1), cfg);
  CHECK(r.pass);
  CHECK(r.tolerance > 0.0);
}

TEST_CASE("monotone: ramp is exactly monotone with closed-form gaps") {
  const std::vector<std::size_t> ns{1, 10, 100};
  auto cfg = det(4096);
  auto r = penalization_monotone_check(ramp(), ns, cfg);
  CHECK(r.pass);
  CHECK(r.worst_margin >= 0.0);
  auto y0 = r.details["y_start"];
  for (std::size_t k = 1; k < 3; ++k) {
    const double n0 = double(ns[k - 1]), n1 = double(ns[k]);
    const double want = (1 - std::exp(-n0)) / n0 - (1 - std::exp(-n1)) / n1;
    CHECK(std::abs(y0[k].get<double>() - y0[k - 1].get<double>() - want) <= 1e-4);
  }
  const std::vector<std::size_t> rep{10, 10};
  auto same = penalization_monotone_check(ramp(), rep, det(64));
  CHECK(same.worst_margin == 0.0);
  const std::vector<std::size_t> down{10, 1, 2};
  CHECK_THROWS_AS(penalization_monotone_check(ramp(), down, det(8)), ConfigError);
}

TEST_CASE("monotone: stochastic within statistical tolerance") {
  const std::vector<std::size_t> ns{1, 10, 100};
  auto cfg = det(32);
  cfg.m_inner = 500;
  cfg.m_outer = 6;
  auto r = penalization_monotone_check(stochastic(), ns, cfg);
  CHECK(r.pass);
}

TEST_CASE("convergence on the ramp") {
  const std::vector<std::size_t> ns{10, 100, 1000};
  auto r = convergence_check(ramp(), ns, det(512));
  CHECK(r.pass);
  auto a = r.details["sup_shortfall"];
  CHECK(std::abs(a[0].get<double>() - 0.09999) <= 1e-4);
  CHECK(std::abs(a[1].get<double>() - 0.01000) <= 1e-4);
  CHECK(std::abs(r.details["loglog_slope"].get<double>() + 1.0) <= 0.1);

  Problem low{zero_coefficients(0.0), catalog::obstacle("constant", {{"level", -5.0}}), std::nullopt};
  auto z = convergence_check(low, ns, det(64));
  for (const auto& v : z.details["sup_shortfall"]) CHECK(v.get<double>() == 0.0);
  CHECK(z.pass);
}

TEST_CASE("energy bound") {
  const std::vector<std::size_t> ns{1, 10, 100};
  Problem zero{zero_coefficients(0.0), ObstacleSpec::none(), std::nullopt};
  auto z = energy_bound_check(zero, ns, 1.0, det(16));
  CHECK(z.pass);
  for (const auto& row : z.details["energies"]) CHECK(row["total"].get<double>() == 0.0);

  const std::vector<std::size_t> big{1, 10, 100, 1000};
  auto r = energy_bound_check(ramp(), big, 1.0, det(512));
  const auto& last = r.details["energies"].back();
  CHECK(std::abs(last["e_sup"].get<double>() - 1.0) <= 0.02);
  CHECK(std::abs(last["e_K"].get<double>() - 1.0) <= 0.02);
  CHECK(r.pass);
}
