#include "rgbdsde/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgbdsde/error.hpp"

namespace rgbdsde {

namespace {

double distance_to(std::span<const double> x, const std::vector<double>& c) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += (x[k] - c[k]) * (x[k] - c[k]);
  return std::sqrt(s);
}

}  // namespace

Domain Domain::interval(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("interval domain requires finite lo < hi");
  Domain d;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Domain Domain::ball(std::vector<double> center, double radius) {
  if (center.empty()) throw ConfigError("ball domain requires a center of dimension >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball domain requires a positive radius");
  Domain d;
  d.is_ball_ = true;
  d.center_ = std::move(center);
  d.radius_ = radius;
  return d;
}

void Domain::check_dim(std::span<const double> x) const {
  if (x.size() != dimension())
    throw ConfigError("point of dimension " + std::to_string(x.size()) + " given to a domain of dimension " +
                      std::to_string(dimension()));
}

double Domain::psi(std::span<const double> x) const {
  check_dim(x);
  if (is_ball_) return radius_ - distance_to(x, center_);
  return std::min(x[0] - lo_, hi_ - x[0]);
}

Location Domain::contains(std::span<const double> x) const {
  const double v = psi(x);
  if (std::abs(v) <= kBoundaryTolerance) return Location::boundary;
  return v > 0.0 ? Location::interior : Location::outside;
}

double Domain::project_in_place(std::span<double> x) const {
  if (!is_ball_) {
    const double p = std::clamp(x[0], lo_, hi_);
    const double disp = std::abs(x[0] - p);
    x[0] = p;
    return disp;
  }
  const double r = distance_to(x, center_);
  if (r <= radius_ + kBoundaryTolerance) return 0.0;
  const double scale = radius_ / r;
  for (std::size_t k = 0; k < center_.size(); ++k) x[k] = center_[k] + scale * (x[k] - center_[k]);
  return r - radius_;
}

Projection Domain::project(std::span<const double> x) const {
  check_dim(x);
  Projection p{{x.begin(), x.end()}, 0.0};
  p.displacement = project_in_place(p.point);
  return p;
}

std::vector<double> Domain::inward_normal(std::span<const double> x) const {
  if (contains(x) != Location::boundary) throw PreconditionError("inward_normal: point is not on the boundary");
  if (!is_ball_) return {std::abs(x[0] - lo_) <= kBoundaryTolerance ? 1.0 : -1.0};
  const double r = distance_to(x, center_);
  std::vector<double> n(center_.size());
  for (std::size_t k = 0; k < n.size(); ++k) n[k] = (center_[k] - x[k]) / r;
  return n;
}

}  // namespace rgbdsde
