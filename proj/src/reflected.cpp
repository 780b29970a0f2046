#include "rgbdsde/reflected.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rgbdsde/error.hpp"
#include "rgbdsde/parallel.hpp"

namespace rgbdsde {

DiffusionSpec linear_diffusion(std::vector<double> start, double drift0, double drift1, double sigma) {
  DiffusionSpec s;
  const std::size_t d = start.size();
  s.start = std::move(start);
  s.drift = [drift0, drift1](std::span<const double> x, std::span<double> out) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = drift0 + drift1 * x[k];
  };
  s.sigma = [sigma, d](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < d; ++k) out[k * d + k] = sigma;
  };
  s.lipschitz = std::max({std::abs(drift1), std::abs(sigma), 1e-12});
  return s;
}

std::size_t steps_for_remaining_time(const TimeGrid& grid, double t) {
  if (!(t >= 0.0) || t > grid.horizon * (1.0 + 1e-12))
    throw ConfigError("remaining time " + std::to_string(t) + " lies outside [0, T]");
  const double ratio = t / grid.dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded))
    throw ConfigError("remaining time " + std::to_string(t) + " is not a multiple of the grid step");
  return static_cast<std::size_t>(rounded);
}

ReflectedPathBundle simulate_reflected(const DiffusionSpec& spec, const Domain& dom, const TimeGrid& grid,
                                       const NoisePaths& paths, unsigned threads) {
  const std::size_t d = dom.dimension();
  if (spec.start.size() != d) throw ConfigError("simulate_reflected: start point dimension does not match the domain");
  if (!dom.in_closure(spec.start)) throw ConfigError("simulate_reflected: start point lies outside the domain closure");
  if (paths.w_dim != d) throw ConfigError("simulate_reflected: W dimension does not match the domain dimension");
  if (paths.grid.steps != grid.steps) throw ConfigError("simulate_reflected: noise and grid step counts differ");
  if (!spec.drift || !spec.sigma) throw ConfigError("simulate_reflected: drift and sigma must be set");

  ReflectedPathBundle out;
  out.scenarios = paths.inner;
  out.steps = grid.steps;
  out.dim = d;
  out.X.resize(out.scenarios * (out.steps + 1) * d);
  out.dA.resize(out.scenarios * out.steps);
  out.A_total.resize(out.scenarios);
  const double dt = grid.dt;

  parallel_for(out.scenarios, threads, [&](std::size_t m) {
    std::vector<double> drift(d), sigma(d * d), next(d);
    double* X = out.X.data() + m * (out.steps + 1) * d;
    std::copy(spec.start.begin(), spec.start.end(), X);
    dom.project_in_place({X, d});
    double total = 0.0;
    for (std::size_t i = 0; i < out.steps; ++i) {
      std::span<const double> xi{X + i * d, d};
      spec.drift(xi, drift);
      spec.sigma(xi, sigma);
      auto dw = paths.dw(m, i);
      for (std::size_t r = 0; r < d; ++r) {
        double v = xi[r] + drift[r] * dt;
        for (std::size_t c = 0; c < d; ++c) v += sigma[r * d + c] * dw[c];
        if (!std::isfinite(v))
          throw NumericError("simulate_reflected: non-finite state at step " + std::to_string(i) + ", scenario " +
                             std::to_string(m));
        next[r] = v;
      }
      const double push = dom.project_in_place(next);
      std::copy(next.begin(), next.end(), X + (i + 1) * d);
      out.dA[m * out.steps + i] = push;
      total += push;
    }
    out.A_total[m] = total;
  });
  return out;
}

LocalTimeStats local_time_moments(const ReflectedPathBundle& bundle, double mu, std::span<const int> powers) {
  if (bundle.scenarios == 0) throw PreconditionError("local_time_moments: empty bundle");
  LocalTimeStats s;
  s.mu = mu;
  s.powers.assign(powers.begin(), powers.end());
  s.moments.assign(powers.size(), 0.0);
  const double n = static_cast<double>(bundle.scenarios);
  for (double a : bundle.A_total) {
    for (std::size_t k = 0; k < powers.size(); ++k) s.moments[k] += std::pow(a, powers[k]) / n;
    const double e = std::exp(mu * a);
    if (!std::isfinite(e)) s.overflow = true;
    s.exp_moment += e / n;
  }
  if (!std::isfinite(s.exp_moment)) {
    s.overflow = true;
    s.exp_moment = std::numeric_limits<double>::infinity();
  }
  return s;
}

ContinuityReport continuity_probe(const DiffusionSpec& spec, const Domain& dom, const TimeGrid& grid,
                                  std::span<const std::pair<ProbePoint, ProbePoint>> pairs, std::size_t scenarios,
                                  std::uint64_t seed) {
  if (pairs.empty()) throw ConfigError("continuity_probe: empty pair list");
  const std::size_t d = dom.dimension();
  const NoisePaths noise = sample_paths(grid, d, 1, scenarios, 1, seed);

  // Internal node j of a run over n steps sits at remaining time (n - j) dt, and
  // its cumulative push from the start is the local time accrued by that remaining time.
  auto run = [&](const ProbePoint& p, std::size_t n, ReflectedPathBundle& bundle) {
    for (double v : p.x)
      if (!std::isfinite(v)) throw ConfigError("continuity_probe: non-finite probe point");
    if (!dom.in_closure(p.x)) throw ConfigError("continuity_probe: probe point outside the domain closure");
    if (n == 0) return;
    DiffusionSpec local = spec;
    local.start = p.x;
    const NoisePaths window = remaining_time_window(noise, n);
    bundle = simulate_reflected(local, dom, window.grid, window);
  };

  ContinuityReport report;
  for (const auto& [a, b] : pairs) {
    if (a.t > b.t) throw PreconditionError("continuity_probe: pairs must satisfy t1 <= t2");
    const std::size_t n1 = steps_for_remaining_time(grid, a.t);
    const std::size_t n2 = steps_for_remaining_time(grid, b.t);
    ReflectedPathBundle p1, p2;
    run(a, n1, p1);
    run(b, n2, p2);
    ContinuityRow row{a, b};
    double dx4 = 0.0;
    for (std::size_t k = 0; k < d; ++k) dx4 += (a.x[k] - b.x[k]) * (a.x[k] - b.x[k]);
    dx4 *= dx4;
    row.scale = (b.t - a.t) * (b.t - a.t) + dx4;
    for (std::size_t m = 0; m < scenarios; ++m) {
      std::vector<double> c1(n1 + 1, 0.0), c2(n2 + 1, 0.0);
      for (std::size_t j = 0; j < n1; ++j) c1[j + 1] = c1[j] + p1.da(m, j);
      for (std::size_t j = 0; j < n2; ++j) c2[j + 1] = c2[j] + p2.da(m, j);
      double sup_x = 0.0, sup_a = 0.0;
      for (std::size_t q = 0; q <= std::min(n1, n2); ++q) {
        const std::size_t j1 = n1 - q, j2 = n2 - q;
        double dist2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double x1 = n1 == 0 ? a.x[k] : p1.x(m, j1)[k];
          const double x2 = n2 == 0 ? b.x[k] : p2.x(m, j2)[k];
          dist2 += (x1 - x2) * (x1 - x2);
        }
        sup_x = std::max(sup_x, dist2 * dist2);
        const double a1 = c1[j1];
        const double a2 = c2[j2];
        sup_a = std::max(sup_a, std::pow(a1 - a2, 4));
      }
      row.x_moment += sup_x / static_cast<double>(scenarios);
      row.a_moment += sup_a / static_cast<double>(scenarios);
    }
    auto ratio = [&](double moment) {
      if (row.scale > 0.0) return moment / row.scale;
      return moment == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    row.x_ratio = ratio(row.x_moment);
    row.a_ratio = ratio(row.a_moment);
    report.max_ratio = std::max({report.max_ratio, row.x_ratio, row.a_ratio});
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace rgbdsde
