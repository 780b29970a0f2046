#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rgbdsde {

enum class Location { interior, boundary, outside };

struct Projection {
  std::vector<double> point;
  double displacement = 0.0;
};

// Bounded convex domain {psi > 0}: an interval (lo, hi) in 1D or an open ball
// in R^d. psi is the signed distance to the boundary, positive inside.
class Domain {
 public:
  static constexpr double kBoundaryTolerance = 1e-12;

  static Domain interval(double lo, double hi);
  static Domain ball(std::vector<double> center, double radius);

  std::size_t dimension() const { return is_ball_ ? center_.size() : 1; }
  bool is_interval() const { return !is_ball_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& center() const { return center_; }
  double radius() const { return radius_; }

  double psi(std::span<const double> x) const;
  Location contains(std::span<const double> x) const;
  bool in_closure(std::span<const double> x) const { return contains(x) != Location::outside; }

  Projection project(std::span<const double> x) const;
  /// Projects x onto the closure in place and returns the displacement.
  double project_in_place(std::span<double> x) const;

  /// Unit inward normal at a boundary point; PreconditionError elsewhere.
  std::vector<double> inward_normal(std::span<const double> x) const;

 private:
  Domain() = default;
  void check_dim(std::span<const double> x) const;

  bool is_ball_ = false;
  double lo_ = 0.0, hi_ = 1.0;
  std::vector<double> center_;
  double radius_ = 1.0;
};

}  // namespace rgbdsde
