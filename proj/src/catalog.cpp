#include "rgbdsde/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "rgbdsde/error.hpp"

namespace rgbdsde::catalog {

namespace {

using nlohmann::json;

// Reads numeric parameters with defaults and rejects keys nobody asked for.
class Params {
 public:
  Params(const json& j, std::string where) : j_(j.is_null() ? json::object() : j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": parameters must be a JSON object");
  }
  double num(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_number()) throw ConfigError(where_ + ": parameter '" + key + "' must be a number");
    return j_[key].get<double>();
  }
  std::vector<double> vec(const std::string& key, std::vector<double> fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_array()) throw ConfigError(where_ + ": parameter '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j_[key]) {
      if (!v.is_number()) throw ConfigError(where_ + ": parameter '" + key + "' must hold numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  std::string str(const std::string& key, std::string fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_string()) throw ConfigError(where_ + ": parameter '" + key + "' must be a string");
    return j_[key].get<std::string>();
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(where_ + ": unknown parameter '" + k + "'");
  }

 private:
  json j_;
  std::string where_;
  std::set<std::string> seen_;
};

double sum(PointView v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double bump(PointView v) {
  double s = 0.0;
  for (double x : v) s += x * (1.0 - x);
  return s;
}

struct Affine {
  double f0 = 0, fy = 0, fz = 0, phi0 = 0, phiy = 0, g0 = 0, gy = 0, gz = 0, xi0 = 0, xi1 = 0, xi_bump = 0;
};

CoefficientSet make_affine(const Affine& a, std::size_t b_dim) {
  CoefficientSet c;
  c.b_dim = b_dim;
  c.terminal = [a](PointView x) { return a.xi0 + a.xi1 * sum(x) + a.xi_bump * bump(x); };
  c.f = [a](double, PointView, double y, PointView z) { return a.f0 + a.fy * y + a.fz * sum(z); };
  c.phi = [a](double, PointView, double y) { return a.phi0 + a.phiy * y; };
  c.g = [a](double, PointView, double y, PointView z, std::span<double> out) {
    const double v = a.g0 + a.gy * y + a.gz * sum(z);
    std::fill(out.begin(), out.end(), v);
  };
  c.g_depends_on_yz = a.gy != 0.0 || a.gz != 0.0;
  return c;
}

void apply_constants(CoefficientSet& c, Params& p, double c_default, double k_default) {
  c.constants.c = p.num("c", std::max(c_default, 1e-6));
  c.constants.beta = p.num("beta", -1.0);
  c.constants.alpha = p.num("alpha", 0.5);
  c.constants.growth_K = p.num("K", std::max(k_default, 1.0));
  c.constants.mu = p.num("mu", 1.0);
}

}  // namespace

std::vector<std::string> coefficient_families() {
  return {"zero", "linear", "affine", "saturating", "ramp", "pinned", "heat_obstacle", "standard_stochastic"};
}

CoefficientSet coefficients(const std::string& family, const json& params) {
  Params p(params, "coefficients '" + family + "'");
  const auto b_dim = static_cast<std::size_t>(p.num("b_dim", 1.0));
  if (b_dim < 1) throw ConfigError("coefficients: b_dim must be at least 1");
  Affine a;
  CoefficientSet c;
  if (family == "zero" || family == "ramp") {
    a.xi0 = family == "zero" ? p.num("xi0", 0.0) : 0.0;
    c = make_affine(a, b_dim);
  } else if (family == "linear" || family == "affine") {
    a.fy = p.num("fy", 0.0);
    a.fz = p.num("fz", 0.0);
    a.phiy = p.num("phiy", -1.0);
    a.gy = p.num("gy", 0.0);
    a.gz = p.num("gz", 0.0);
    a.xi1 = p.num("xi1", 0.0);
    if (family == "affine") {
      a.f0 = p.num("f0", 0.0);
      a.phi0 = p.num("phi0", 0.0);
      a.g0 = p.num("g0", 0.0);
      a.xi0 = p.num("xi0", 0.0);
      a.xi_bump = p.num("xi_bump", 0.0);
    }
    c = make_affine(a, b_dim);
  } else if (family == "saturating") {
    const double f0 = p.num("f0", 0.0), f_amp = p.num("f_amp", 0.5), phiy = p.num("phiy", -1.0),
                 g_amp = p.num("g_amp", 0.2), xi0 = p.num("xi0", 1.0), xi_amp = p.num("xi_amp", 0.25);
    c.b_dim = b_dim;
    c.terminal = [xi0, xi_amp](PointView x) {
      double s = 0.0;
      for (double v : x) s += std::sin(std::numbers::pi * v);
      return xi0 + xi_amp * s;
    };
    c.f = [f0, f_amp](double, PointView, double y, PointView) { return f0 + f_amp * std::tanh(y); };
    c.phi = [phiy](double, PointView, double y) { return phiy * y; };
    c.g = [g_amp](double, PointView, double y, PointView, std::span<double> out) {
      std::fill(out.begin(), out.end(), g_amp * std::tanh(y));
    };
    c.g_depends_on_yz = g_amp != 0.0;
    a.f0 = std::abs(f0) + std::abs(f_amp);
    a.fy = f_amp;
    a.gy = g_amp;
    a.phiy = phiy;
    a.xi0 = std::abs(xi0) + std::abs(xi_amp);
  } else if (family == "pinned") {
    a.phiy = -1.0;
    a.xi0 = 1.0;
    c = make_affine(a, b_dim);
  } else if (family == "heat_obstacle" || family == "standard_stochastic") {
    a.phiy = -1.0;
    a.xi0 = 1.0;
    a.xi_bump = 0.5;
    if (family == "standard_stochastic") {
      a.fy = p.num("fy", -0.5);
      a.gy = p.num("gy", 0.2);
    }
    c = make_affine(a, b_dim);
  } else {
    throw ConfigError("unknown coefficient family '" + family + "'");
  }
  c.name = family;
  const double lip = std::max({a.fy * a.fy + a.fz * a.fz, a.gy * a.gy});
  const double growth = std::abs(a.f0) + std::abs(a.fy) + std::abs(a.fz) + std::abs(a.phi0) + std::abs(a.phiy) +
                        std::abs(a.g0) + std::abs(a.gy) + std::abs(a.gz) + std::abs(a.xi0) + std::abs(a.xi1) +
                        std::abs(a.xi_bump);
  apply_constants(c, p, lip, growth);
  p.finish();
  return c;
}

ObstacleSpec obstacle(const std::string& family, const json& params) {
  Params p(params, "obstacle '" + family + "'");
  ObstacleSpec o;
  if (family == "none") {
    // disabled
  } else if (family == "constant") {
    const double level = p.num("level", 0.0);
    o.enabled = true;
    o.level = [level](double, PointView) { return level; };
  } else if (family == "ramp") {
    const double slope = p.num("slope", 1.0), offset = p.num("offset", 0.0);
    o.enabled = true;
    o.level = [slope, offset](double t, PointView) { return slope * t + offset; };
  } else {
    throw ConfigError("unknown obstacle family '" + family + "'");
  }
  p.finish();
  return o;
}

Domain domain(const json& spec) {
  Params p(spec, "domain");
  const std::string kind = p.str("kind", "interval");
  Domain d = Domain::interval(0.0, 1.0);
  if (kind == "interval") {
    d = Domain::interval(p.num("lo", 0.0), p.num("hi", 1.0));
  } else if (kind == "ball") {
    d = Domain::ball(p.vec("center", {0.0, 0.0}), p.num("radius", 1.0));
  } else {
    throw ConfigError("unknown domain kind '" + kind + "'");
  }
  p.finish();
  return d;
}

DiffusionSpec diffusion(const json& spec) {
  Params p(spec, "diffusion");
  auto start = p.vec("start", {0.5});
  const double drift0 = p.num("drift0", 0.0), drift1 = p.num("drift1", 0.0), sigma = p.num("sigma", 1.0);
  p.finish();
  return linear_diffusion(std::move(start), drift0, drift1, sigma);
}

}  // namespace rgbdsde::catalog
