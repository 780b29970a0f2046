#include "rgbdsde/timegrid.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

#include "rgbdsde/error.hpp"

namespace rgbdsde {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fill_gaussian(std::uint64_t key, double scale, std::span<double> out) {
  std::mt19937_64 engine(key);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v = scale * normal(engine);
}

DriverMoments driver_moments(std::span<const double> values) {
  DriverMoments m;
  if (values.empty()) return m;
  double sum = 0.0, sq = 0.0;
  for (double v : values) {
    sum += v;
    sq += v * v;
    m.max_abs = std::max(m.max_abs, std::abs(v));
  }
  const double n = static_cast<double>(values.size());
  m.mean = sum / n;
  m.variance = sq / n;
  return m;
}

}  // namespace

TimeGrid make_grid(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("time grid: horizon must be positive and finite");
  if (steps < 1) throw ConfigError("time grid: number of steps must be at least 1");
  TimeGrid g;
  g.horizon = horizon;
  g.steps = steps;
  g.dt = horizon / static_cast<double>(steps);
  g.times.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) g.times[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  g.times[steps] = horizon;
  return g;
}

std::uint64_t stream_key(std::uint64_t seed, Driver driver, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64((static_cast<std::uint64_t>(driver) << 48) ^ index));
}

void NoisePaths::check_shape() const {
  if (grid.steps == 0 || grid.times.size() != grid.steps + 1) throw ConfigError("noise paths: malformed time grid");
  if (w_dim == 0 || b_dim == 0) throw ConfigError("noise paths: driver dimensions must be positive");
  if (inner == 0 || outer == 0) throw ConfigError("noise paths: scenario counts must be positive");
  if (w_increments.size() != inner * grid.steps * w_dim) throw ConfigError("noise paths: W array has wrong size");
  if (b_increments.size() != outer * grid.steps * b_dim) throw ConfigError("noise paths: B array has wrong size");
}

NoisePaths sample_paths(const TimeGrid& grid, std::size_t w_dim, std::size_t b_dim, std::size_t inner,
                        std::size_t outer, std::uint64_t seed) {
  if (w_dim < 1 || b_dim < 1) throw ConfigError("sample_paths: driver dimensions must be at least 1");
  if (inner < 1 || outer < 1) throw ConfigError("sample_paths: scenario counts must be at least 1");
  if (grid.steps < 1) throw ConfigError("sample_paths: empty time grid");
  NoisePaths p;
  p.grid = grid;
  p.w_dim = w_dim;
  p.b_dim = b_dim;
  p.inner = inner;
  p.outer = outer;
  p.seed = seed;
  p.w_increments.resize(inner * grid.steps * w_dim);
  p.b_increments.resize(outer * grid.steps * b_dim);
  const double scale = std::sqrt(grid.dt);
  const std::size_t w_len = grid.steps * w_dim;
  const std::size_t b_len = grid.steps * b_dim;
  for (std::size_t m = 0; m < inner; ++m)
    fill_gaussian(stream_key(seed, Driver::W, m), scale, {p.w_increments.data() + m * w_len, w_len});
  for (std::size_t o = 0; o < outer; ++o)
    fill_gaussian(stream_key(seed, Driver::B, o), scale, {p.b_increments.data() + o * b_len, b_len});
  return p;
}

NoisePaths remaining_time_window(const NoisePaths& paths, std::size_t steps) {
  if (steps < 1 || steps > paths.grid.steps)
    throw ConfigError("remaining_time_window: window length must lie in [1, N]");
  NoisePaths w;
  w.grid = make_grid(paths.grid.dt * static_cast<double>(steps), steps);
  w.w_dim = paths.w_dim;
  w.b_dim = paths.b_dim;
  w.inner = paths.inner;
  w.outer = paths.outer;
  w.seed = paths.seed;
  w.w_increments.resize(w.inner * steps * w.w_dim);
  w.b_increments.resize(w.outer * steps * w.b_dim);
  for (std::size_t m = 0; m < w.inner; ++m)
    for (std::size_t i = 0; i < steps; ++i) {
      auto src = paths.dw(m, steps - 1 - i);
      std::copy(src.begin(), src.end(), w.w_increments.begin() + static_cast<std::ptrdiff_t>((m * steps + i) * w.w_dim));
    }
  for (std::size_t o = 0; o < w.outer; ++o)
    for (std::size_t i = 0; i < steps; ++i) {
      auto src = paths.db(o, steps - 1 - i);
      std::copy(src.begin(), src.end(), w.b_increments.begin() + static_cast<std::ptrdiff_t>((o * steps + i) * w.b_dim));
    }
  return w;
}

MomentReport moment_report(const NoisePaths& paths) {
  MomentReport r;
  r.dt = paths.grid.dt;
  r.w = driver_moments(paths.w_increments);
  r.b = driver_moments(paths.b_increments);
  auto flag = [&](DriverMoments& m, const char* name) {
    if (m.variance < 0.5 * r.dt || m.variance > 2.0 * r.dt) {
      m.flagged = true;
      r.flags.push_back(std::string(name) + " variance outside [0.5 dt, 2 dt]");
    }
  };
  flag(r.w, "W");
  flag(r.b, "B");
  return r;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("RGBDSDE_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') throw ConfigError(std::string("RGBDSDE_SEED is not an unsigned integer: ") + raw);
  return static_cast<std::uint64_t>(v);
}

}  // namespace rgbdsde
