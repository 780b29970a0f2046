#include "rgbdsde/pde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rgbdsde/error.hpp"

namespace rgbdsde {

namespace {

constexpr double kComplementarityTol = 1e-8;
constexpr int kMaxRamps = 8;
constexpr int kMaxActiveSetSweeps = 100;
constexpr double kInitialPenalty = 1e6;

// Thomas algorithm; sub/sup have the same length as diag, sub[0] and sup[n-1] unused.
void solve_tridiagonal(const std::vector<double>& sub, std::vector<double> diag, const std::vector<double>& sup,
                       std::vector<double> rhs, std::vector<double>& out) {
  const std::size_t n = diag.size();
  for (std::size_t j = 1; j < n; ++j) {
    const double w = sub[j] / diag[j - 1];
    diag[j] -= w * sup[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  out.resize(n);
  out[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) out[j] = (rhs[j] - sup[j] * out[j + 1]) / diag[j];
}

}  // namespace

FdMesh make_mesh(double lo, double hi, std::size_t intervals, double horizon, std::size_t steps) {
  if (!(lo < hi)) throw ConfigError("fd mesh: requires lo < hi");
  if (intervals < 2 || steps < 1) throw ConfigError("fd mesh: requires at least 2 intervals and 1 step");
  if (!(horizon > 0.0)) throw ConfigError("fd mesh: horizon must be positive");
  return FdMesh{lo, hi, intervals, horizon, steps};
}

double FdSolution::at(double t, double x) const {
  const double eps = 1e-12;
  if (t < -eps || t > mesh.horizon + eps || x < mesh.lo - eps || x > mesh.hi + eps)
    throw ConfigError("fd solution: probe outside the mesh");
  const double ft = std::clamp(t / mesh.dt(), 0.0, static_cast<double>(mesh.steps));
  const double fx = std::clamp((x - mesh.lo) / mesh.dx(), 0.0, static_cast<double>(mesh.intervals));
  const std::size_t k = std::min(static_cast<std::size_t>(ft), mesh.steps - 1);
  const std::size_t j = std::min(static_cast<std::size_t>(fx), mesh.intervals - 1);
  const double a = ft - static_cast<double>(k), b = fx - static_cast<double>(j);
  return (1 - a) * ((1 - b) * at_node(k, j) + b * at_node(k, j + 1)) +
         a * ((1 - b) * at_node(k + 1, j) + b * at_node(k + 1, j + 1));
}

double FdSolution::range() const {
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  return *hi - *lo;
}

FdSolution solve_obstacle_pde_1d(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                                 const DiffusionSpec& diffusion, const FdMesh& mesh) {
  const std::size_t J = mesh.intervals, n = J + 1;
  const double dx = mesh.dx(), dt = mesh.dt();
  {
    double gval[1];
    const double probe_y[] = {-1.0, 0.0, 1.0};
    const double zero_z[] = {0.0};
    for (double y : probe_y)
      for (std::size_t j = 0; j < n; j += std::max<std::size_t>(1, J / 8)) {
        const double x[] = {mesh.node(j)};
        if (coeffs.b_dim != 1) throw PreconditionError("pde oracle: requires g = 0");
        coeffs.g(0.5 * mesh.horizon, x, y, zero_z, gval);
        if (gval[0] != 0.0) throw PreconditionError("pde oracle: requires g = 0");
      }
  }

  FdSolution sol;
  sol.mesh = mesh;
  sol.u.assign((mesh.steps + 1) * n, 0.0);
  sol.penalty_iterations.assign(mesh.steps, 0);

  std::vector<double> xs(n), a(n), b(n), h(n);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = mesh.node(j);
    const double x[] = {xs[j]};
    double drift[1], sig[1];
    diffusion.drift(x, drift);
    diffusion.sigma(x, sig);
    a[j] = 0.5 * sig[0] * sig[0];
    b[j] = drift[0];
    if (a[j] > 0.0) sol.max_peclet = std::max(sol.max_peclet, std::abs(b[j]) * dx / (sig[0] * sig[0]));
    else if (b[j] != 0.0) sol.max_peclet = std::numeric_limits<double>::infinity();
    sol.u[j] = coeffs.terminal(x);
  }
  if (sol.max_peclet > 2.0) {
    std::ostringstream os;
    os << "mesh Peclet number " << sol.max_peclet << " exceeds 2; centred convection may oscillate";
    sol.warnings.push_back(os.str());
  }

  std::vector<double> sub(n), diag(n), sup(n), rhs(n), base(n), cur(n), next(n);
  for (std::size_t k = 0; k < mesh.steps; ++k) {
    const double t = dt * static_cast<double>(k + 1);
    const double* prev = sol.u.data() + k * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double x[] = {xs[j]};
      h[j] = obstacle.enabled ? obstacle.at(t, x) : -std::numeric_limits<double>::infinity();
    }
    // Linear operator (I - dt L) with ghost-node boundary rows.
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = a[j] / (dx * dx), conv = b[j] / (2.0 * dx);
      diag[j] = 1.0 + 2.0 * dt * diff;
      if (j == 0) {
        sub[j] = 0.0;
        sup[j] = -2.0 * dt * diff;
      } else if (j == J) {
        sub[j] = -2.0 * dt * diff;
        sup[j] = 0.0;
      } else {
        sub[j] = -dt * (diff - conv);
        sup[j] = -dt * (diff + conv);
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double x[] = {xs[j]};
      double grad = 0.0;
      if (j > 0 && j < J) grad = (prev[j + 1] - prev[j - 1]) / (2.0 * dx);
      double sig[1];
      diffusion.sigma(x, sig);
      const double z[] = {sig[0] * grad};
      base[j] = prev[j] + dt * coeffs.f(t, x, prev[j], z);
    }

    // Boundary pass: phi lagged at the previous layer, then once more at the new layer.
    std::copy(prev, prev + n, cur.begin());
    int iterations = 0;
    for (int pass = 0; pass < 2; ++pass) {
      rhs = base;
      const double x0[] = {xs[0]}, xJ[] = {xs[J]};
      const double phi0 = coeffs.phi(t, x0, cur[0]), phiJ = coeffs.phi(t, xJ, cur[J]);
      // u_{-1} = u_1 + 2 dx phi_0 and u_{J+1} = u_{J-1} + 2 dx phi_J.
      rhs[0] += dt * (2.0 * a[0] / dx - b[0]) * phi0;
      rhs[J] += dt * (2.0 * a[J] / dx + b[J]) * phiJ;

      double penalty = kInitialPenalty;
      double residual = 0.0;
      bool done = !obstacle.enabled;
      if (!obstacle.enabled) solve_tridiagonal(sub, diag, sup, rhs, cur);
      for (int ramp = 0; !done && ramp <= kMaxRamps; ++ramp, penalty *= 10.0) {
        std::vector<char> active(n, 0), previous;
        for (std::size_t j = 0; j < n; ++j) active[j] = cur[j] < h[j];
        for (int sweep = 0; sweep < kMaxActiveSetSweeps; ++sweep) {
          std::vector<double> dg = diag, r = rhs;
          for (std::size_t j = 0; j < n; ++j)
            if (active[j]) {
              dg[j] += penalty;
              r[j] += penalty * h[j];
            }
          solve_tridiagonal(sub, dg, sup, r, next);
          ++iterations;
          previous = active;
          for (std::size_t j = 0; j < n; ++j) active[j] = next[j] < h[j];
          cur = next;
          if (active == previous) break;
        }
        residual = 0.0;
        for (std::size_t j = 0; j < n; ++j) residual = std::max(residual, h[j] - cur[j]);
        done = residual < kComplementarityTol;
      }
      if (!done) {
        std::ostringstream os;
        os << "pde oracle: penalty iteration did not reach complementarity at step " << k + 1 << " (residual "
           << residual << ")";
        throw NumericError(os.str());
      }
    }
    for (double v : cur)
      if (!std::isfinite(v)) throw NumericError("pde oracle: non-finite value at step " + std::to_string(k + 1));
    std::copy(cur.begin(), cur.end(), sol.u.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
    sol.penalty_iterations[k] = iterations;
  }
  return sol;
}

ErrorReport compare_mc_fd(const FieldTable& field, const FdSolution& fd) {
  ErrorReport r;
  r.fd_range = fd.range();
  for (std::size_t p = 0; p < field.probes.size(); ++p) {
    const ProbePoint& probe = field.probes[p];
    if (probe.x.size() != 1) throw ConfigError("compare_mc_fd: the oracle is one-dimensional");
    ErrorRow row{probe, field.mean[p], fd.at(probe.t, probe.x[0])};
    row.abs_error = std::abs(row.mc - row.fd);
    row.rel_error = r.fd_range > 1e-14 ? row.abs_error / r.fd_range : row.abs_error;
    r.max_abs_error = std::max(r.max_abs_error, row.abs_error);
    r.max_rel_error = std::max(r.max_rel_error, row.rel_error);
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace rgbdsde
