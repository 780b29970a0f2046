#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rgbdsde {

using PointView = std::span<const double>;

// Declared assumption constants. c bounds the squared Lipschitz quotients of f
// and of g in y; alpha bounds the squared z-quotient of g; phi is monotone with
// constant beta; K bounds linear growth; mu weights exp(mu A) in the energy.
struct AssumptionConstants {
  double c = 1.0;
  double beta = -1.0;
  double alpha = 0.5;
  double growth_K = 1.0;
  double mu = 1.0;
};

/// ConfigError unless c > 0, beta < 0, 0 < alpha < 1, K > 0, mu > 0.
void check_constants(const AssumptionConstants& k);

// Problem data. Every time argument is remaining time (distance to the
// terminal-condition side). Abstract problems pass an empty state x.
struct CoefficientSet {
  std::string name;
  std::function<double(PointView x)> terminal;
  std::function<double(double t, PointView x, double y, PointView z)> f;
  std::function<double(double t, PointView x, double y)> phi;
  std::function<void(double t, PointView x, double y, PointView z, std::span<double> out)> g;
  std::size_t b_dim = 1;
  bool g_depends_on_yz = false;
  AssumptionConstants constants;
};

/// All-zero drivers with constant terminal value.
CoefficientSet zero_coefficients(double terminal_value = 0.0);

// Lower barrier: S(t) for abstract problems (x empty), h(t, x) for field problems.
struct ObstacleSpec {
  std::function<double(double t, PointView x)> level;
  bool enabled = false;

  static ObstacleSpec none() { return {}; }
  double at(double t, PointView x) const { return level(t, x); }
};

struct SamplingBox {
  double horizon = 1.0;
  std::size_t x_dim = 0;  // 0 for abstract problems
  std::size_t z_dim = 1;
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_range = 2.0;
  double z_range = 2.0;
};

struct AssumptionReport {
  std::size_t samples = 0;
  double f_lipschitz_sq = 0.0;   // sup |df|^2 / (|dy|^2 + |dz|^2)
  double g_y_quotient_sq = 0.0;  // sup |dg|^2 / |dy|^2 at fixed z
  double g_z_quotient_sq = 0.0;  // sup |dg|^2 / |dz|^2 at fixed y
  double phi_monotonicity = -std::numeric_limits<double>::infinity();  // sup <dy, dphi> / |dy|^2
  double growth_ratio = 0.0;     // sup |coefficient| / (K (1 + |x| + |y| + |z|))
  double compatibility_gap = std::numeric_limits<double>::infinity();  // min (terminal - obstacle) at remaining time 0
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Sampling-based check of the declared constants. Deterministic given seed.
AssumptionReport validate_assumptions(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                                      std::size_t sample_budget, std::uint64_t seed, const SamplingBox& box);

/// Driver f_n = f + n (y - S)^-; all other fields unchanged.
CoefficientSet penalize(const CoefficientSet& coeffs, const ObstacleSpec& obstacle, std::size_t n);

}  // namespace rgbdsde
