#include "rgbdsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "rgbdsde/error.hpp"
#include "rgbdsde/parallel.hpp"
#include "rgbdsde/regression.hpp"

namespace rgbdsde {

namespace {

enum class StepRule { none, penalty, reflect };

// Forward simulation and per-node regressors; shared by every sweep on the same noise.
struct Prepared {
  std::size_t dim = 1;
  std::optional<ReflectedPathBundle> bundle;
  std::vector<std::shared_ptr<const LeastSquaresRegressor>> regressors;  // one per step
};

Prepared prepare(const Problem& problem, const NoisePaths& paths, const SolverConfig& cfg) {
  paths.check_shape();
  check_constants(problem.coeffs.constants);
  const TimeGrid& grid = cfg.grid;
  if (paths.grid.steps != grid.steps || std::abs(paths.grid.dt - grid.dt) > 1e-12 * grid.dt)
    throw ConfigError("solver: noise grid does not match the solver grid");
  if (paths.inner != cfg.m_inner || paths.outer != cfg.m_outer)
    throw ConfigError("solver: noise scenario counts do not match the solver configuration");
  if (paths.b_dim != problem.coeffs.b_dim) throw ConfigError("solver: B dimension does not match the coefficients");
  if (!problem.coeffs.terminal || !problem.coeffs.f || !problem.coeffs.phi || !problem.coeffs.g)
    throw ConfigError("solver: coefficient set is incomplete");
  if (problem.obstacle.enabled && !problem.obstacle.level) throw ConfigError("solver: enabled obstacle has no level");

  Prepared prep;
  const std::size_t M = cfg.m_inner;
  if (problem.forward) {
    prep.dim = problem.forward->domain.dimension();
    if (paths.w_dim != prep.dim) throw ConfigError("solver: W dimension does not match the domain dimension");
    cfg.validate(prep.dim);
    prep.bundle = simulate_reflected(problem.forward->diffusion, problem.forward->domain, grid, paths, cfg.threads);
    prep.regressors.resize(grid.steps);
    const std::size_t d = prep.dim;
    parallel_for(grid.steps, cfg.threads, [&](std::size_t i) {
      std::vector<double> feats(M * d);
      for (std::size_t m = 0; m < M; ++m) {
        auto x = prep.bundle->x(m, i);
        std::copy(x.begin(), x.end(), feats.begin() + static_cast<std::ptrdiff_t>(m * d));
      }
      prep.regressors[i] = std::make_shared<const LeastSquaresRegressor>(feats, M, d, cfg.degree);
    });
  } else {
    prep.dim = paths.w_dim;
    cfg.validate(0);
    auto mean = std::make_shared<const LeastSquaresRegressor>(std::span<const double>{}, M, 0, cfg.degree);
    prep.regressors.assign(grid.steps, mean);
  }
  return prep;
}

void fill_diagnostics(BdsdeSolution& sol, const Problem& problem, const char* variant, double n) {
  auto& d = sol.diagnostics;
  d.variant = variant;
  d.penalty_n = n;
  d.skorokhod_residual = sol.has_obstacle ? skorokhod_residual(sol) : 0.0;
  d.min_gap = std::numeric_limits<double>::infinity();
  if (sol.has_obstacle)
    for (std::size_t k = 0; k < sol.Y.size(); ++k) d.min_gap = std::min(d.min_gap, sol.Y[k] - sol.S[k]);
  d.energy = energy_statistic(sol, sol.forward ? &*sol.forward : nullptr, problem.coeffs.constants.mu);
}

BdsdeSolution sweep(const Problem& problem, const NoisePaths& paths, const SolverConfig& cfg, const Prepared& prep,
                    StepRule rule, double n, const BdsdeSolution* frozen) {
  const TimeGrid& grid = cfg.grid;
  const std::size_t N = grid.steps, M = cfg.m_inner, O = cfg.m_outer, d = prep.dim;
  const std::size_t ell = problem.coeffs.b_dim;
  const double dt = grid.dt;
  const CoefficientSet& co = problem.coeffs;
  const ObstacleSpec& obstacle = problem.obstacle;
  const bool use_obstacle = obstacle.enabled && rule != StepRule::none;
  const ReflectedPathBundle* bundle = prep.bundle ? &*prep.bundle : nullptr;

  BdsdeSolution sol;
  sol.grid = grid;
  sol.outer = O;
  sol.inner = M;
  sol.dim = d;
  sol.has_obstacle = use_obstacle;
  sol.Y.assign(O * M * (N + 1), 0.0);
  sol.K.assign(O * M * (N + 1), 0.0);
  sol.S.assign(O * M * (N + 1), -std::numeric_limits<double>::infinity());
  sol.Z.assign(O * M * N * d, 0.0);
  sol.dK.assign(O * M * N, 0.0);

  auto state = [&](std::size_t m, std::size_t i) -> PointView {
    return bundle ? bundle->x(m, i) : PointView{};
  };

  parallel_for(O, cfg.threads, [&](std::size_t o) {
    std::vector<double> next(M), proxy(M), work(M), fitted(M), g(ell);
    auto fail = [&](std::size_t i, const char* what) {
      std::ostringstream os;
      os << "solver: non-finite " << what << " at step " << i << " (outer path " << o << ")";
      throw NumericError(os.str());
    };

    for (std::size_t m = 0; m < M; ++m) {
      const double xi = co.terminal(state(m, N));
      if (!std::isfinite(xi)) fail(N, "terminal value");
      sol.Y[sol.node(o, m, N)] = xi;
      if (use_obstacle) {
        const double s = obstacle.at(grid.remaining(N), state(m, N));
        if (xi < s - 1e-12 * std::max(1.0, std::abs(s))) {
          std::ostringstream os;
          os << "solver: terminal value " << xi << " lies below the obstacle " << s
             << " at the terminal-condition layer";
          throw ConfigError(os.str());
        }
        sol.S[sol.node(o, m, N)] = s;
      }
    }

    for (std::size_t step = N; step-- > 0;) {
      const std::size_t i = step;
      const LeastSquaresRegressor& reg = *prep.regressors[i];
      const double s_i = grid.remaining(i), s_next = grid.remaining(i + 1);
      for (std::size_t m = 0; m < M; ++m) next[m] = sol.Y[sol.node(o, m, i + 1)];

      reg.fit(next, proxy);
      // Z_i = E_i[(Y_{i+1} - E_i Y_{i+1}) dW_i] / dt, one regression per component.
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t m = 0; m < M; ++m) work[m] = (next[m] - proxy[m]) * paths.dw(m, i)[k];
        reg.fit(work, fitted);
        for (std::size_t m = 0; m < M; ++m) sol.Z[sol.step(o, m, i) * d + k] = fitted[m] / dt;
      }

      auto db = paths.db(o, i);
      for (std::size_t m = 0; m < M; ++m) {
        PointView z{sol.Z.data() + sol.step(o, m, i) * d, d};
        const double y_arg = frozen ? frozen->Y[frozen->node(o, m, i + 1)] : next[m];
        PointView z_arg = frozen ? PointView{frozen->Z.data() + frozen->step(o, m, i) * d, d} : z;
        co.g(s_next, state(m, i + 1), y_arg, z_arg, g);
        double v = next[m];
        for (std::size_t k = 0; k < ell; ++k) v += g[k] * db[k];
        if (bundle) {
          const double push = bundle->da(m, i);
          if (push > 0.0) v += co.phi(s_next, state(m, i + 1), next[m]) * push;
        }
        work[m] = v;
      }
      reg.fit(work, fitted);

      for (std::size_t m = 0; m < M; ++m) {
        PointView z{sol.Z.data() + sol.step(o, m, i) * d, d};
        double y = fitted[m] + co.f(s_i, state(m, i), proxy[m], z) * dt;
        double dk = 0.0;
        const std::size_t nd = sol.node(o, m, i);
        if (use_obstacle) {
          const double s = obstacle.at(s_i, state(m, i));
          sol.S[nd] = s;
          if (rule == StepRule::reflect) {
            dk = std::max(s - y, 0.0);
            y = std::max(y, s);
          } else if (y < s) {
            const double w = n * dt;
            y = (y + w * s) / (1.0 + w);
            dk = w * std::max(s - y, 0.0);
          }
        }
        if (!std::isfinite(y)) fail(i, "Y");
        sol.Y[nd] = y;
        sol.dK[sol.step(o, m, i)] = dk;
        sol.K[nd] = sol.K[sol.node(o, m, i + 1)] + dk;
      }
    }
  });

  if (bundle) sol.forward = *bundle;
  return sol;
}

BdsdeSolution zero_like(const SolverConfig& cfg, std::size_t dim) {
  BdsdeSolution z;
  z.grid = cfg.grid;
  z.outer = cfg.m_outer;
  z.inner = cfg.m_inner;
  z.dim = dim;
  z.Y.assign(z.outer * z.inner * (cfg.grid.steps + 1), 0.0);
  z.Z.assign(z.outer * z.inner * cfg.grid.steps * dim, 0.0);
  return z;
}

}  // namespace

void SolverConfig::validate(std::size_t feature_dim) const {
  if (grid.steps == 0) throw ConfigError("solver config: empty grid");
  if (m_inner == 0 || m_outer == 0) throw ConfigError("solver config: scenario counts must be positive");
  if (degree < 0) throw ConfigError("solver config: negative regression degree");
  if (!(picard_tol > 0.0)) throw ConfigError("solver config: picard_tol must be positive");
  const std::size_t need = 10 * basis_dimension(feature_dim, degree);
  if (m_inner < need)
    throw ConfigError("solver config: M_inner = " + std::to_string(m_inner) + " is below 10 x basis dimension (" +
                      std::to_string(need) + ")");
}

NoisePaths sample_paths_for(const Problem& problem, const SolverConfig& config) {
  const std::size_t d = problem.forward ? problem.forward->domain.dimension() : config.w_dim;
  return sample_paths(config.grid, d, problem.coeffs.b_dim, config.m_inner, config.m_outer, config.seed);
}

double BdsdeSolution::y_mean(std::size_t o, std::size_t i) const {
  std::vector<double> v(inner);
  for (std::size_t m = 0; m < inner; ++m) v[m] = y(o, m, i);
  return stable_mean(v);
}

BdsdeSolution solve_plain(const Problem& problem, const NoisePaths& paths, const SolverConfig& config) {
  const Prepared prep = prepare(problem, paths, config);
  BdsdeSolution sol = sweep(problem, paths, config, prep, StepRule::none, 0.0, nullptr);
  fill_diagnostics(sol, problem, "plain", 0.0);
  return sol;
}

BdsdeSolution solve_penalized(const Problem& problem, std::size_t n, const NoisePaths& paths,
                              const SolverConfig& config) {
  const Prepared prep = prepare(problem, paths, config);
  const double weight = static_cast<double>(n);
  BdsdeSolution sol = sweep(problem, paths, config, prep, StepRule::penalty, weight, nullptr);
  fill_diagnostics(sol, problem, "penalized", weight);
  return sol;
}

BdsdeSolution solve_reflected(const Problem& problem, const NoisePaths& paths, const SolverConfig& config) {
  const Prepared prep = prepare(problem, paths, config);
  BdsdeSolution sol = sweep(problem, paths, config, prep, StepRule::reflect, 0.0, nullptr);
  fill_diagnostics(sol, problem, "reflected", 0.0);
  return sol;
}

PicardResult picard_solve(const Problem& problem, const NoisePaths& paths, const SolverConfig& config,
                          PicardVariant variant) {
  check_constants(problem.coeffs.constants);
  if (config.picard_max < 1) throw ConfigError("picard_solve: picard_max must be at least 1");
  const Prepared prep = prepare(problem, paths, config);
  const auto& k = problem.coeffs.constants;
  const WeightedNormConstants norm{k.mu, k.beta, k.c / k.alpha};
  const StepRule rule = variant == PicardVariant::reflected ? StepRule::reflect : StepRule::none;
  const std::span<const double> dA = prep.bundle ? std::span<const double>(prep.bundle->dA) : std::span<const double>{};

  PicardResult result;
  BdsdeSolution frozen = zero_like(config, prep.dim);
  std::vector<double> dy, dz;
  for (std::size_t it = 0; it < config.picard_max; ++it) {
    BdsdeSolution next = sweep(problem, paths, config, prep, rule, 0.0, &frozen);
    dy.resize(next.Y.size());
    dz.resize(next.Z.size());
    for (std::size_t q = 0; q < dy.size(); ++q) dy[q] = next.Y[q] - frozen.Y[q];
    for (std::size_t q = 0; q < dz.size(); ++q) dz[q] = next.Z[q] - frozen.Z[q];
    const double delta =
        std::sqrt(weighted_norm({config.m_outer, config.m_inner, prep.dim}, dy, dz, dA, config.grid, norm));
    result.deltas.push_back(delta);
    frozen = std::move(next);
    if (delta < config.picard_tol) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) {
    std::ostringstream os;
    os << "picard_solve: no convergence in " << config.picard_max << " iterations; deltas:";
    for (double v : result.deltas) os << ' ' << v;
    throw PicardNotConverged(os.str(), result.deltas);
  }
  result.solution = std::move(frozen);
  fill_diagnostics(result.solution, problem, variant == PicardVariant::reflected ? "picard-reflected" : "picard",
                   0.0);
  return result;
}

double weighted_norm(SolutionLayout layout, std::span<const double> Y, std::span<const double> Z,
                     std::span<const double> dA, const TimeGrid& grid, const WeightedNormConstants& k) {
  const std::size_t N = grid.steps, P = layout.outer * layout.inner, d = layout.dim;
  if (Y.size() != P * (N + 1) || Z.size() != P * N * d) throw ConfigError("weighted_norm: inconsistent array shapes");
  if (!dA.empty() && dA.size() != layout.inner * N) throw ConfigError("weighted_norm: dA has wrong size");
  double total = 0.0;
  std::vector<double> A(N + 1);
  for (std::size_t p = 0; p < P; ++p) {
    const std::size_t m = p % layout.inner;
    A[N] = 0.0;
    for (std::size_t i = N; i-- > 0;) A[i] = A[i + 1] + (dA.empty() ? 0.0 : dA[m * N + i]);
    double path = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double w = std::exp(k.mu * grid.remaining(i) + k.beta * A[i]);
      const double y2 = Y[p * (N + 1) + i] * Y[p * (N + 1) + i];
      double z2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) z2 += Z[(p * N + i) * d + c] * Z[(p * N + i) * d + c];
      const double push = dA.empty() ? 0.0 : dA[m * N + i];
      path += w * (k.c_bar * y2 * grid.dt + std::abs(k.beta) * y2 * push + z2 * grid.dt);
    }
    total += path;
  }
  return total / static_cast<double>(P);
}

double skorokhod_residual(const BdsdeSolution& sol) {
  if (!sol.has_obstacle) throw PreconditionError("skorokhod_residual: solution has no obstacle");
  const std::size_t N = sol.steps();
  double total = 0.0;
  for (std::size_t o = 0; o < sol.outer; ++o)
    for (std::size_t m = 0; m < sol.inner; ++m) {
      double path = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double dk = sol.dK[sol.step(o, m, i)];
        if (dk != 0.0) path += (sol.Y[sol.node(o, m, i)] - sol.S[sol.node(o, m, i)]) * dk;
      }
      total += path;
    }
  return total / static_cast<double>(sol.paths());
}

EnergyStats energy_statistic(const BdsdeSolution& sol, const ReflectedPathBundle* bundle, double mu) {
  const std::size_t N = sol.steps(), d = sol.dim;
  if (bundle && (bundle->steps != N || bundle->scenarios != sol.inner))
    throw ConfigError("energy_statistic: bundle shape does not match the solution");
  EnergyStats e;
  std::vector<double> A(N + 1);
  for (std::size_t o = 0; o < sol.outer; ++o)
    for (std::size_t m = 0; m < sol.inner; ++m) {
      A[N] = 0.0;
      for (std::size_t i = N; i-- > 0;) A[i] = A[i + 1] + (bundle ? bundle->da(m, i) : 0.0);
      double sup = 0.0, da_term = 0.0, z_term = 0.0;
      for (std::size_t i = 0; i <= N; ++i) {
        const double w = std::exp(mu * A[i]);
        const double y2 = sol.y(o, m, i) * sol.y(o, m, i);
        sup = std::max(sup, w * y2);
        if (i == N) break;
        if (bundle) da_term += w * y2 * bundle->da(m, i);
        double z2 = 0.0;
        for (std::size_t c = 0; c < d; ++c) z2 += sol.Z[sol.step(o, m, i) * d + c] * sol.Z[sol.step(o, m, i) * d + c];
        z_term += w * z2 * sol.grid.dt;
      }
      const double kt = sol.K.empty() ? 0.0 : sol.k_total(o, m);
      e.e_sup += sup;
      e.e_dA += da_term;
      e.e_Z += z_term;
      e.e_K += kt * kt;
    }
  const double P = static_cast<double>(sol.paths());
  e.e_sup /= P;
  e.e_dA /= P;
  e.e_Z /= P;
  e.e_K /= P;
  return e;
}

}  // namespace rgbdsde
