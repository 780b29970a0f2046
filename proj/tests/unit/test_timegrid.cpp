#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "rgbdsde/error.hpp"
#include "rgbdsde/timegrid.hpp"

using namespace rgbdsde;

TEST_CASE("make_grid arithmetic") {
  auto g = make_grid(1.0, 4);
  REQUIRE(g.times.size() == 5);
  CHECK(g.dt == 0.25);
  const double want[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(g.times[i] == doctest::Approx(want[i]).epsilon(1e-15));
  CHECK(g.times.back() == 1.0);

  auto one = make_grid(1.0, 1);
  REQUIRE(one.times.size() == 2);
  CHECK(one.times[0] == 0.0);
  CHECK(one.times[1] == 1.0);

  auto h = make_grid(0.5, 5);
  CHECK(h.dt == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(h.times[3] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(h.remaining(3) == doctest::Approx(0.2).epsilon(1e-14));

  CHECK_THROWS_AS(make_grid(1.0, 0), ConfigError);
  CHECK_THROWS_AS(make_grid(0.0, 4), ConfigError);
  CHECK_THROWS_AS(make_grid(-1.0, 4), ConfigError);
}

TEST_CASE("sample_paths determinism and stream separation") {
  auto g = make_grid(1.0, 16);
  auto a = sample_paths(g, 2, 1, 50, 3, 42);
  auto b = sample_paths(g, 2, 1, 50, 3, 42);
  CHECK(a.w_increments == b.w_increments);
  CHECK(a.b_increments == b.b_increments);
  auto c = sample_paths(g, 2, 1, 50, 3, 43);
  CHECK(a.w_increments != c.w_increments);
  CHECK(a.b_increments != c.b_increments);
  CHECK(a.w_increments.size() == 50 * 16 * 2);
  CHECK(a.b_increments.size() == 3 * 16);
  CHECK(a.w_stream_id(0) != a.b_stream_id(0));
  CHECK(a.w_stream_id(0) != a.w_stream_id(1));
  CHECK_NOTHROW(a.check_shape());
  a.w_increments.pop_back();
  CHECK_THROWS_AS(a.check_shape(), ConfigError);
}

TEST_CASE("scenario streams do not depend on the cloud size") {
  auto g = make_grid(1.0, 8);
  auto small = sample_paths(g, 1, 1, 5, 2, 9);
  auto large = sample_paths(g, 1, 1, 40, 4, 9);
  for (std::size_t k = 0; k < small.w_increments.size(); ++k) CHECK(small.w_increments[k] == large.w_increments[k]);
  for (std::size_t k = 0; k < small.b_increments.size(); ++k) CHECK(small.b_increments[k] == large.b_increments[k]);
}

TEST_CASE("Gaussian moments at N=64, M=4096") {
  auto g = make_grid(1.0, 64);
  const std::size_t M = 4096;
  auto p = sample_paths(g, 1, 1, M, 1, 2024);
  for (std::size_t i = 0; i < g.steps; ++i) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const double v = p.dw(m, i)[0];
      s += v;
      s2 += v * v;
    }
    const double mean = s / M;
    const double var = s2 / M - mean * mean;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(g.dt / M));
    CHECK(std::abs(var - g.dt) <= 0.1 * g.dt);
  }
  auto r = moment_report(p);
  CHECK(r.flags.empty());
  CHECK_FALSE(r.w.flagged);
}

TEST_CASE("moment_report degenerate inputs") {
  auto g = make_grid(1.0, 4);
  auto p = sample_paths(g, 1, 1, 3, 1, 1);
  std::fill(p.w_increments.begin(), p.w_increments.end(), 0.0);
  auto r = moment_report(p);
  CHECK(r.w.mean == 0.0);
  CHECK(r.w.variance == 0.0);
  CHECK(r.w.flagged);
  CHECK_FALSE(r.flags.empty());

  auto one = sample_paths(make_grid(1.0, 1), 1, 1, 1, 1, 5);
  auto r1 = moment_report(one);
  CHECK(r1.w.variance == doctest::Approx(one.w_increments[0] * one.w_increments[0]).epsilon(1e-15));
}

TEST_CASE("remaining_time_window shares noise on common spans") {
  auto g = make_grid(1.0, 8);
  auto p = sample_paths(g, 1, 2, 4, 2, 11);
  auto w3 = remaining_time_window(p, 3);
  auto w5 = remaining_time_window(p, 5);
  CHECK(w3.grid.steps == 3);
  CHECK(w3.grid.horizon == doctest::Approx(3 * g.dt));
  // The last internal step of any window is remaining-time increment 0.
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(w3.dw(m, 2)[0] == p.dw(m, 0)[0]);
    CHECK(w5.dw(m, 4)[0] == p.dw(m, 0)[0]);
    CHECK(w3.dw(m, 0)[0] == w5.dw(m, 2)[0]);
  }
  for (std::size_t o = 0; o < 2; ++o)
    for (std::size_t k = 0; k < 2; ++k) CHECK(w3.db(o, 1)[k] == p.db(o, 1)[k]);
  CHECK_THROWS(remaining_time_window(p, 9));
}

TEST_CASE("seed_from_env") {
  ::setenv("RGBDSDE_SEED", "123", 1);
  CHECK(seed_from_env() == std::optional<std::uint64_t>(123));
  ::setenv("RGBDSDE_SEED", "12x", 1);
  CHECK_THROWS_AS(seed_from_env(), ConfigError);
  ::unsetenv("RGBDSDE_SEED");
  CHECK_FALSE(seed_from_env().has_value());
}
