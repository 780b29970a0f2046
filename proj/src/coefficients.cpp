#include "rgbdsde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rgbdsde/error.hpp"

namespace rgbdsde {

namespace {

constexpr double kRelativeSlack = 1e-9;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dist_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void check_constants(const AssumptionConstants& k) {
  if (!(k.alpha < 1.0)) throw ConfigError("declared alpha = " + fmt(k.alpha) + " must be < 1 for the contraction argument");
  if (!(k.alpha > 0.0)) throw ConfigError("declared alpha must be > 0");
  if (!(k.beta < 0.0)) throw ConfigError("declared beta must be < 0");
  if (!(k.c > 0.0)) throw ConfigError("declared c must be > 0");
  if (!(k.growth_K > 0.0)) throw ConfigError("declared growth constant K must be > 0");
  if (!(k.mu > 0.0)) throw ConfigError("declared mu must be > 0");
}

CoefficientSet zero_coefficients(double terminal_value) {
  CoefficientSet c;
  c.name = "zero";
  c.terminal = [terminal_value](PointView) { return terminal_value; };
  c.f = [](double, PointView, double, PointView) { return 0.0; };
  c.phi = [](double, PointView, double) { return 0.0; };
  c.g = [](double, PointView, double, PointView, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  return c;
}

AssumptionReport validate_assumptions(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                                      std::size_t sample_budget, std::uint64_t seed, const SamplingBox& box) {
  if (sample_budget < 100) throw ConfigError("validate_assumptions: sample budget must be at least 100");
  check_constants(coeffs.constants);
  const AssumptionConstants& k = coeffs.constants;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, box.horizon), ux(box.x_lo, box.x_hi),
      uy(-box.y_range, box.y_range), uz(-box.z_range, box.z_range);
  const std::size_t xd = box.x_dim, zd = box.z_dim, bd = coeffs.b_dim;
  std::vector<double> x(xd), z1(zd), z2(zd), g1(bd), g2(bd);

  AssumptionReport r;
  r.samples = sample_budget;
  for (std::size_t s = 0; s < sample_budget; ++s) {
    const double t = ut(rng);
    for (double& v : x) v = ux(rng);
    for (double& v : z1) v = uz(rng);
    for (double& v : z2) v = uz(rng);
    const double y1 = uy(rng);
    double y2 = uy(rng);
    if (y2 == y1) y2 += 1.0;
    const double xn = norm(x);

    const double df = coeffs.f(t, x, y1, z1) - coeffs.f(t, x, y2, z2);
    r.f_lipschitz_sq = std::max(r.f_lipschitz_sq, df * df / ((y1 - y2) * (y1 - y2) + dist_sq(z1, z2)));

    coeffs.g(t, x, y1, z1, g1);
    coeffs.g(t, x, y2, z1, g2);
    r.g_y_quotient_sq = std::max(r.g_y_quotient_sq, dist_sq(g1, g2) / ((y1 - y2) * (y1 - y2)));
    const double growth_g = norm(g1) / (k.growth_K * (1.0 + xn + std::abs(y1) + norm(z1)));
    if (zd > 0 && dist_sq(z1, z2) > 0.0) {
      coeffs.g(t, x, y1, z2, g2);
      r.g_z_quotient_sq = std::max(r.g_z_quotient_sq, dist_sq(g1, g2) / dist_sq(z1, z2));
    }

    const double dphi = coeffs.phi(t, x, y1) - coeffs.phi(t, x, y2);
    r.phi_monotonicity = std::max(r.phi_monotonicity, (y1 - y2) * dphi / ((y1 - y2) * (y1 - y2)));

    const double growth_f = std::abs(coeffs.f(t, x, y1, z1)) / (k.growth_K * (1.0 + xn + std::abs(y1) + norm(z1)));
    const double growth_phi = std::abs(coeffs.phi(t, x, y1)) / (k.growth_K * (1.0 + xn + std::abs(y1)));
    const double growth_l = std::abs(coeffs.terminal(x)) / (k.growth_K * (1.0 + xn));
    r.growth_ratio = std::max({r.growth_ratio, growth_f, growth_phi, growth_g, growth_l});
    if (obstacle.enabled) {
      r.growth_ratio = std::max(r.growth_ratio, std::abs(obstacle.at(t, x)) / (k.growth_K * (1.0 + xn)));
      r.compatibility_gap = std::min(r.compatibility_gap, coeffs.terminal(x) - obstacle.at(0.0, x));
    }
  }

  auto exceeds = [](double empirical, double declared) {
    return empirical > declared + kRelativeSlack * std::max(1.0, std::abs(declared));
  };
  if (exceeds(r.f_lipschitz_sq, k.c))
    r.violations.push_back("f: empirical squared Lipschitz quotient " + fmt(r.f_lipschitz_sq) + " exceeds c = " + fmt(k.c));
  if (exceeds(r.g_y_quotient_sq, k.c))
    r.violations.push_back("g: empirical squared y-quotient " + fmt(r.g_y_quotient_sq) + " exceeds c = " + fmt(k.c));
  if (exceeds(r.g_z_quotient_sq, k.alpha))
    r.violations.push_back("g: empirical squared z-quotient " + fmt(r.g_z_quotient_sq) + " exceeds alpha = " +
                           fmt(k.alpha));
  // Abstract problems carry no boundary push, so phi never enters them.
  if (box.x_dim > 0 && exceeds(r.phi_monotonicity, k.beta))
    r.violations.push_back("phi: empirical monotonicity quotient " + fmt(r.phi_monotonicity) + " exceeds beta = " +
                           fmt(k.beta));
  if (exceeds(r.growth_ratio, 1.0))
    r.violations.push_back("growth: coefficient magnitude exceeds K (1 + |x| + |y| + |z|) by factor " +
                           fmt(r.growth_ratio));
  if (obstacle.enabled && r.compatibility_gap < -kRelativeSlack)
    r.violations.push_back("obstacle: terminal value lies below the obstacle at remaining time 0 (gap " +
                           fmt(r.compatibility_gap) + ")");
  return r;
}

CoefficientSet penalize(const CoefficientSet& coeffs, const ObstacleSpec& obstacle, std::size_t n) {
  if (!obstacle.enabled) throw PreconditionError("penalize: obstacle is disabled");
  if (n < 1) throw PreconditionError("penalize: penalty index must be >= 1");
  CoefficientSet out = coeffs;
  const double weight = static_cast<double>(n);
  out.f = [base = coeffs.f, level = obstacle.level, weight](double t, PointView x, double y, PointView z) {
    return base(t, x, y, z) + weight * std::max(level(t, x) - y, 0.0);
  };
  out.name = coeffs.name + "+penalty(" + std::to_string(n) + ")";
  return out;
}

}  // namespace rgbdsde
