#include "rgbdsde/field.hpp"

#include <cmath>
#include <sstream>

#include "rgbdsde/digest.hpp"
#include "rgbdsde/error.hpp"
#include "rgbdsde/regression.hpp"

namespace rgbdsde {

namespace {

std::string describe(const SolverConfig& c, std::span<const ProbePoint> probes) {
  std::ostringstream os;
  os.precision(17);
  os << "T=" << c.grid.horizon << ";N=" << c.grid.steps << ";Mi=" << c.m_inner << ";Mo=" << c.m_outer
     << ";deg=" << c.degree << ";seed=" << c.seed;
  for (const auto& p : probes) {
    os << ";(" << p.t;
    for (double v : p.x) os << ',' << v;
    os << ')';
  }
  return fnv1a_hex(os.str());
}

}  // namespace

FieldTable evaluate_field(const FieldProblem& problem, std::span<const ProbePoint> probes, const SolverConfig& config) {
  const Domain& dom = problem.domain;
  const std::size_t d = dom.dimension();
  for (const auto& p : probes) {
    if (p.x.size() != d) throw ConfigError("evaluate_field: probe dimension does not match the domain");
    if (!dom.in_closure(p.x)) throw ConfigError("evaluate_field: probe lies outside the domain closure");
    steps_for_remaining_time(config.grid, p.t);
  }
  const NoisePaths noise =
      sample_paths(config.grid, d, problem.coeffs.b_dim, config.m_inner, config.m_outer, config.seed);

  FieldTable table;
  table.probes.assign(probes.begin(), probes.end());
  table.outer = config.m_outer;
  table.values.assign(config.m_outer * probes.size(), 0.0);
  table.seed = config.seed;
  table.config_hash = describe(config, probes);

  for (std::size_t p = 0; p < probes.size(); ++p) {
    const ProbePoint& probe = probes[p];
    const std::size_t n = steps_for_remaining_time(config.grid, probe.t);
    if (n == 0) {
      // Initial layer: u(0, x) = l(x), which the obstacle may not exceed.
      const double l = problem.coeffs.terminal(probe.x);
      if (problem.obstacle.enabled && l < problem.obstacle.at(0.0, probe.x))
        throw ConfigError("evaluate_field: terminal value lies below the obstacle at remaining time 0");
      for (std::size_t o = 0; o < config.m_outer; ++o) table.values[o * probes.size() + p] = l;
      continue;
    }
    const NoisePaths window = remaining_time_window(noise, n);
    SolverConfig local = config;
    local.grid = window.grid;
    Problem bdsde{problem.coeffs, problem.obstacle, ForwardModel{dom, problem.diffusion}};
    bdsde.forward->diffusion.start = probe.x;
    const BdsdeSolution sol = solve_reflected(bdsde, window, local);
    for (std::size_t o = 0; o < config.m_outer; ++o) table.values[o * probes.size() + p] = sol.y_mean(o, 0);
  }

  table.mean.assign(probes.size(), 0.0);
  table.sd.assign(probes.size(), 0.0);
  std::vector<double> column(config.m_outer);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    for (std::size_t o = 0; o < config.m_outer; ++o) column[o] = table.value(o, p);
    const double mu = stable_mean(column);
    double ss = 0.0;
    for (double v : column) ss += (v - mu) * (v - mu);
    table.mean[p] = mu;
    table.sd[p] = config.m_outer > 1 ? std::sqrt(ss / static_cast<double>(config.m_outer - 1)) : 0.0;
  }
  return table;
}

FieldContinuityReport field_continuity_report(const FieldProblem& problem,
                                              std::span<const std::pair<ProbePoint, ProbePoint>> pairs,
                                              const SolverConfig& config) {
  if (pairs.empty()) throw ConfigError("field_continuity_report: empty pair list");
  std::vector<ProbePoint> probes;
  for (const auto& [a, b] : pairs) {
    probes.push_back(a);
    probes.push_back(b);
  }
  const FieldTable table = evaluate_field(problem, probes, config);
  FieldContinuityReport report;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    FieldContinuityRow row;
    row.first = pairs[q].first;
    row.second = pairs[q].second;
    double dx = 0.0;
    for (std::size_t k = 0; k < row.first.x.size(); ++k)
      dx += (row.first.x[k] - row.second.x[k]) * (row.first.x[k] - row.second.x[k]);
    row.distance = std::abs(row.first.t - row.second.t) + std::sqrt(dx);
    for (std::size_t o = 0; o < table.outer; ++o) {
      const double diff = std::abs(table.value(o, 2 * q) - table.value(o, 2 * q + 1));
      row.differences.push_back(diff);
      row.mean_difference += diff / static_cast<double>(table.outer);
    }
    row.modulus = row.distance > 0.0 ? row.mean_difference / row.distance : 0.0;
    report.max_modulus = std::max(report.max_modulus, row.modulus);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace rgbdsde
