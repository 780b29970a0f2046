#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rgbdsde/coefficients.hpp"
#include "rgbdsde/field.hpp"
#include "rgbdsde/reflected.hpp"

namespace rgbdsde {

/// Uniform space-time mesh on [lo, hi] x [0, T] with J intervals and N_fd steps.
struct FdMesh {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t intervals = 200;
  double horizon = 1.0;
  std::size_t steps = 256;

  double dx() const { return (hi - lo) / static_cast<double>(intervals); }
  double dt() const { return horizon / static_cast<double>(steps); }
  double node(std::size_t j) const { return lo + dx() * static_cast<double>(j); }
};

FdMesh make_mesh(double lo, double hi, std::size_t intervals, double horizon, std::size_t steps);

struct FdSolution {
  FdMesh mesh;
  std::vector<double> u;  // [(steps + 1) x (intervals + 1)], row k at time k dt
  std::vector<int> penalty_iterations;
  double max_peclet = 0.0;
  std::vector<std::string> warnings;

  double at_node(std::size_t k, std::size_t j) const { return u[k * (mesh.intervals + 1) + j]; }
  /// Bilinear interpolation; ConfigError outside the mesh.
  double at(double t, double x) const;
  double range() const;
};

// Obstacle problem min{u - h, u_t - L u - f} = 0 on (lo, hi), u(0, .) = l,
// du/dn + phi(t, x, u) = 0 with n the inward normal, for g = 0. Implicit Euler
// in time, centred differences, ghost nodes at the ends, penalty iteration for
// the obstacle.
FdSolution solve_obstacle_pde_1d(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                                 const DiffusionSpec& diffusion, const FdMesh& mesh);

struct ErrorRow {
  ProbePoint probe;
  double mc = 0.0;
  double fd = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;  // abs_error / FD range (abs_error when the range vanishes)
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  double fd_range = 0.0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
};

ErrorReport compare_mc_fd(const FieldTable& field, const FdSolution& fd);

}  // namespace rgbdsde
