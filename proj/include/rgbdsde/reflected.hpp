#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "rgbdsde/domain.hpp"
#include "rgbdsde/timegrid.hpp"

namespace rgbdsde {

/// Coefficients of the forward diffusion. sigma writes a row-major d x d matrix.
struct DiffusionSpec {
  std::function<void(std::span<const double> x, std::span<double> out)> drift;
  std::function<void(std::span<const double> x, std::span<double> out)> sigma;
  std::vector<double> start;
  double lipschitz = 1.0;
};

/// Constant-coefficient convenience: b(x) = drift0 + drift1 * x, sigma(x) = sigma * I.
DiffusionSpec linear_diffusion(std::vector<double> start, double drift0, double drift1, double sigma);

// Reflected paths in internal forward orientation. X is [scenario][node][component]
// with N + 1 nodes; dA is the boundary push at each step and is positive only
// when the post-step state sits on the boundary.
struct ReflectedPathBundle {
  std::size_t scenarios = 0;
  std::size_t steps = 0;
  std::size_t dim = 0;
  std::vector<double> X;
  std::vector<double> dA;
  std::vector<double> A_total;

  std::span<const double> x(std::size_t m, std::size_t i) const {
    return {X.data() + (m * (steps + 1) + i) * dim, dim};
  }
  double da(std::size_t m, std::size_t i) const { return dA[m * steps + i]; }
};

/// Projected Euler scheme: X_{i+1} = proj(X_i + b dt + sigma dW_i), dA_i = |projection displacement|.
ReflectedPathBundle simulate_reflected(const DiffusionSpec& spec, const Domain& dom, const TimeGrid& grid,
                                       const NoisePaths& paths, unsigned threads = 1);

struct LocalTimeStats {
  std::vector<int> powers;
  std::vector<double> moments;  // sample E[A_total^p], one per power
  double mu = 0.0;
  double exp_moment = 0.0;      // sample E[exp(mu A_total)]
  bool overflow = false;
};

LocalTimeStats local_time_moments(const ReflectedPathBundle& bundle, double mu, std::span<const int> powers);

struct ProbePoint {
  double t = 0.0;  // remaining time
  std::vector<double> x;
};

struct ContinuityRow {
  ProbePoint first, second;
  double x_moment = 0.0;  // E sup |X1 - X2|^4 over the common time span
  double a_moment = 0.0;  // E sup |A1 - A2|^4
  double scale = 0.0;     // |t2 - t1|^2 + |x1 - x2|^4
  double x_ratio = 0.0;
  double a_ratio = 0.0;
};

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  double max_ratio = 0.0;
};

/// Fourth-moment continuity of (X, A) in the starting point, with common noise for both members of a pair.
ContinuityReport continuity_probe(const DiffusionSpec& spec, const Domain& dom, const TimeGrid& grid,
                                  std::span<const std::pair<ProbePoint, ProbePoint>> pairs, std::size_t scenarios,
                                  std::uint64_t seed);

/// Number of grid steps covering remaining time t; ConfigError when t is off the grid.
std::size_t steps_for_remaining_time(const TimeGrid& grid, double t);

}  // namespace rgbdsde
