#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rgbdsde {

/// Uniform partition of [0, T] into N steps.
struct TimeGrid {
  double horizon = 0.0;
  std::size_t steps = 0;
  double dt = 0.0;
  std::vector<double> times;  // N + 1 nodes, times[0] = 0, times[N] = T

  /// Time left until the horizon at node i, i.e. T - times[i].
  double remaining(std::size_t i) const { return horizon - times[i]; }
};

TimeGrid make_grid(double horizon, std::size_t steps);

enum class Driver : std::uint32_t { W = 0x57, B = 0x42 };

/// Key of the RNG substream for one scenario of one driver. Pure function of
/// its arguments, so scenarios can be generated in any order or in parallel.
std::uint64_t stream_key(std::uint64_t seed, Driver driver, std::uint64_t index);

// Gaussian increments of the two independent drivers. W is indexed
// [scenario][step][component] over the inner cloud; B is indexed
// [outer path][step][component]. Increments are stored, not path values.
struct NoisePaths {
  TimeGrid grid;
  std::size_t w_dim = 1;
  std::size_t b_dim = 1;
  std::size_t inner = 0;
  std::size_t outer = 0;
  std::uint64_t seed = 0;
  std::vector<double> w_increments;
  std::vector<double> b_increments;

  std::span<const double> dw(std::size_t scenario, std::size_t step) const {
    return {w_increments.data() + (scenario * grid.steps + step) * w_dim, w_dim};
  }
  std::span<const double> db(std::size_t path, std::size_t step) const {
    return {b_increments.data() + (path * grid.steps + step) * b_dim, b_dim};
  }
  std::uint64_t w_stream_id(std::size_t scenario) const { return stream_key(seed, Driver::W, scenario); }
  std::uint64_t b_stream_id(std::size_t path) const { return stream_key(seed, Driver::B, path); }

  /// Throws ConfigError if the array sizes disagree with the declared shape.
  void check_shape() const;
};

NoisePaths sample_paths(const TimeGrid& grid, std::size_t w_dim, std::size_t b_dim, std::size_t inner,
                        std::size_t outer, std::uint64_t seed);

// Orientation adapter. The backward equations are written in "remaining time":
// a process started with t units left runs down to remaining time 0, with the
// noise indexed by remaining time. This returns the first `steps` increments of
// that remaining-time axis, reversed so that internal step i of the window uses
// remaining-time increment (steps - 1 - i). Windows of different lengths cut
// from the same NoisePaths therefore share noise on their common time span.
NoisePaths remaining_time_window(const NoisePaths& paths, std::size_t steps);

struct DriverMoments {
  double mean = 0.0;
  double variance = 0.0;  // second moment about the known mean 0
  double max_abs = 0.0;
  bool flagged = false;
};

struct MomentReport {
  double dt = 0.0;
  DriverMoments w;
  DriverMoments b;
  std::vector<std::string> flags;
};

/// Flags a driver whose variance falls outside [0.5 dt, 2 dt].
MomentReport moment_report(const NoisePaths& paths);

/// Seed from the RGBDSDE_SEED environment variable, if set and parseable.
std::optional<std::uint64_t> seed_from_env();

}  // namespace rgbdsde
