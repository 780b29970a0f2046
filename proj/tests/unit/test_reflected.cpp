#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rgbdsde/error.hpp"
#include "rgbdsde/reflected.hpp"

using namespace rgbdsde;

namespace {
ReflectedPathBundle pinned(std::size_t N, std::size_t M = 4) {
  auto grid = make_grid(1.0, N);
  auto noise = sample_paths(grid, 1, 1, M, 1, 3);
  return simulate_reflected(linear_diffusion({0.25}, -1.0, 0.0, 0.0), Domain::interval(0, 1), grid, noise);
}
}  // namespace

TEST_CASE("pinned path: decreases at rate one and pins at zero") {
  const std::size_t N = 64;
  const double dt = 1.0 / N;
  auto b = pinned(N);
  for (std::size_t i = 0; i <= N; ++i) {
    const double exact = std::max(0.25 - i * dt, 0.0);
    CHECK(b.x(0, i)[0] == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(std::abs(b.A_total[0] - 0.75) <= dt);
  for (std::size_t i = 0; i < N; ++i)
    if (b.da(0, i) > 0) CHECK(b.x(0, i + 1)[0] == 0.0);

  const int powers[] = {1, 2, 3};
  auto s = local_time_moments(b, 1.0, powers);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(s.moments[k] - std::pow(0.75, k + 1)) <= 3 * dt);
  CHECK(s.exp_moment == doctest::Approx(std::exp(b.A_total[0])));
  CHECK_FALSE(s.overflow);
}

TEST_CASE("still diffusion has no push") {
  auto grid = make_grid(1.0, 32);
  auto noise = sample_paths(grid, 1, 1, 5, 1, 3);
  auto b = simulate_reflected(linear_diffusion({0.3}, 0.0, 0.0, 0.0), Domain::interval(0, 1), grid, noise);
  for (double x : b.X) CHECK(x == 0.3);
  for (double a : b.dA) CHECK(a == 0.0);
  for (double a : b.A_total) CHECK(a == 0.0);
  const int powers[] = {1, 2};
  auto s = local_time_moments(b, 1.0, powers);
  CHECK(s.moments[0] == 0.0);
  CHECK(s.moments[1] == 0.0);
  CHECK(s.exp_moment == 1.0);
}

TEST_CASE("reflected Brownian motion stays in the closure and touches the boundary") {
  auto grid = make_grid(1.0, 64);
  auto noise = sample_paths(grid, 1, 1, 4096, 1, 17);
  auto b = simulate_reflected(linear_diffusion({0.5}, 0.0, 0.0, 1.0), Domain::interval(0, 1), grid, noise, 4);
  std::size_t pushed = 0;
  CHECK(*std::min_element(b.X.begin(), b.X.end()) >= 0.0);
  CHECK(*std::max_element(b.X.begin(), b.X.end()) <= 1.0);
  CHECK(*std::min_element(b.dA.begin(), b.dA.end()) >= 0.0);
  for (double a : b.dA) pushed += a > 0;
  CHECK(pushed > 0);
  const int powers[] = {1};
  auto s = local_time_moments(b, 1.0, powers);
  CHECK_FALSE(s.overflow);
  CHECK(std::isfinite(s.exp_moment));
  CHECK(s.exp_moment > 1.0);

  auto serial = simulate_reflected(linear_diffusion({0.5}, 0.0, 0.0, 1.0), Domain::interval(0, 1), grid, noise, 1);
  CHECK(serial.X == b.X);
  CHECK(serial.dA == b.dA);
}

TEST_CASE("ball reflection keeps paths in the closed ball") {
  auto grid = make_grid(1.0, 32);
  auto noise = sample_paths(grid, 2, 1, 500, 1, 8);
  auto dom = Domain::ball({0.0, 0.0}, 1.0);
  auto b = simulate_reflected(linear_diffusion({0.2, -0.1}, 0.0, 0.0, 1.0), dom, grid, noise);
  bool inside = true;
  for (std::size_t m = 0; m < b.scenarios; ++m)
    for (std::size_t i = 0; i <= b.steps; ++i) inside = inside && dom.in_closure(b.x(m, i));
  CHECK(inside);
}

TEST_CASE("start outside the closure is rejected") {
  auto grid = make_grid(1.0, 4);
  auto noise = sample_paths(grid, 1, 1, 2, 1, 1);
  CHECK_THROWS_AS(simulate_reflected(linear_diffusion({1.5}, 0, 0, 1), Domain::interval(0, 1), grid, noise),
                  ConfigError);
}

TEST_CASE("continuity probe") {
  auto grid = make_grid(1.0, 32);
  const ProbePoint p{1.0, {0.4}}, q{1.0, {0.5}};
  std::vector<std::pair<ProbePoint, ProbePoint>> same{{p, p}};
  auto rs = continuity_probe(linear_diffusion({0.5}, 0, 0, 1), Domain::interval(0, 1), grid, same, 200, 5);
  CHECK(rs.rows[0].x_moment == 0.0);
  CHECK(rs.rows[0].a_moment == 0.0);

  std::vector<std::pair<ProbePoint, ProbePoint>> still{{p, q}};
  auto r0 = continuity_probe(linear_diffusion({0.5}, 0, 0, 0), Domain::interval(0, 1), grid, still, 10, 5);
  CHECK(r0.rows[0].x_moment == doctest::Approx(1e-4).epsilon(1e-10));
  CHECK(r0.rows[0].a_moment == 0.0);

  std::vector<std::pair<ProbePoint, ProbePoint>> shrinking;
  for (double h : {0.2, 0.1, 0.05}) shrinking.push_back({ProbePoint{1.0, {0.5}}, ProbePoint{1.0, {0.5 + h}}});
  auto r = continuity_probe(linear_diffusion({0.5}, 0, 0, 1), Domain::interval(0, 1), grid, shrinking, 2000, 5);
  double lo = 1e300, hi = 0;
  for (const auto& row : r.rows) {
    lo = std::min(lo, row.x_ratio);
    hi = std::max(hi, row.x_ratio);
  }
  CHECK(hi <= 16.0);  // sup |dX| <= |dx| for this monotone scheme, so ratios stay at most 1 up to MC noise
  CHECK(r.max_ratio < 1e3);

  CHECK(steps_for_remaining_time(grid, 0.5) == 16);
  CHECK_THROWS_AS(steps_for_remaining_time(grid, 0.51), ConfigError);
}
