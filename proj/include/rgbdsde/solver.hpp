#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rgbdsde/coefficients.hpp"
#include "rgbdsde/domain.hpp"
#include "rgbdsde/reflected.hpp"
#include "rgbdsde/timegrid.hpp"

namespace rgbdsde {

struct SolverConfig {
  TimeGrid grid = make_grid(1.0, 64);
  std::size_t w_dim = 1;  // W dimension for abstract problems; field problems use the domain dimension
  std::size_t m_inner = 4096;
  std::size_t m_outer = 1;
  int degree = 2;
  std::optional<std::size_t> penalty_n;
  std::size_t picard_max = 20;
  double picard_tol = 1e-8;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// ConfigError when the inner cloud is too small for the regression basis.
  void validate(std::size_t feature_dim) const;
};

struct ForwardModel {
  Domain domain;
  DiffusionSpec diffusion;
};

// Abstract problems (no forward model) have no state variable and no boundary
// push; conditional expectations reduce to means over the inner cloud.
struct Problem {
  CoefficientSet coeffs;
  ObstacleSpec obstacle;
  std::optional<ForwardModel> forward;
};

struct EnergyStats {
  double e_sup = 0.0;  // mean of sup_i e^{mu A_i} |Y_i|^2
  double e_dA = 0.0;   // mean of sum e^{mu A_i} |Y_i|^2 dA_i
  double e_Z = 0.0;    // mean of sum e^{mu A_i} |Z_i|^2 dt
  double e_K = 0.0;    // mean of K_total^2

  double total() const { return e_sup + e_dA + e_Z + e_K; }
};

struct SolveDiagnostics {
  std::string variant;
  double penalty_n = 0.0;
  double skorokhod_residual = 0.0;
  double min_gap = 0.0;  // min (Y - S) over all nodes; +inf without obstacle
  EnergyStats energy;
};

// Solution arrays are laid out [outer][inner][node] (Z adds a trailing
// component axis). Node i is internal time t_i; the terminal condition sits at
// node N and K grows from 0 there towards node 0.
struct BdsdeSolution {
  TimeGrid grid;
  std::size_t outer = 0;
  std::size_t inner = 0;
  std::size_t dim = 1;
  std::vector<double> Y;   // outer * inner * (N + 1)
  std::vector<double> Z;   // outer * inner * N * dim
  std::vector<double> K;   // outer * inner * (N + 1)
  std::vector<double> dK;  // outer * inner * N
  std::vector<double> S;   // obstacle values, -inf when disabled
  bool has_obstacle = false;
  std::optional<ReflectedPathBundle> forward;
  SolveDiagnostics diagnostics;

  std::size_t steps() const { return grid.steps; }
  std::size_t paths() const { return outer * inner; }
  std::size_t node(std::size_t o, std::size_t m, std::size_t i) const { return (o * inner + m) * (grid.steps + 1) + i; }
  std::size_t step(std::size_t o, std::size_t m, std::size_t i) const { return (o * inner + m) * grid.steps + i; }
  double y(std::size_t o, std::size_t m, std::size_t i) const { return Y[node(o, m, i)]; }
  double k_total(std::size_t o, std::size_t m) const { return K[node(o, m, 0)]; }
  /// Inner-cloud mean of Y at node i for outer path o.
  double y_mean(std::size_t o, std::size_t i) const;
};

/// Noise sized for the problem: W in the domain dimension (or config.w_dim), B in the coefficients' dimension.
NoisePaths sample_paths_for(const Problem& problem, const SolverConfig& config);

BdsdeSolution solve_plain(const Problem& problem, const NoisePaths& paths, const SolverConfig& config);
BdsdeSolution solve_penalized(const Problem& problem, std::size_t n, const NoisePaths& paths,
                              const SolverConfig& config);
BdsdeSolution solve_reflected(const Problem& problem, const NoisePaths& paths, const SolverConfig& config);

struct PicardResult {
  BdsdeSolution solution;
  std::vector<double> deltas;  // weighted-norm distance between successive iterates
  bool converged = false;
};

enum class PicardVariant { plain, reflected };

class PicardNotConverged : public std::runtime_error {
 public:
  PicardNotConverged(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Fixed point of the map freezing (Y, Z) inside g. Throws PicardNotConverged carrying
/// the history when picard_max iterations do not reach picard_tol.
PicardResult picard_solve(const Problem& problem, const NoisePaths& paths, const SolverConfig& config,
                          PicardVariant variant = PicardVariant::reflected);

struct WeightedNormConstants {
  double mu = 1.0;
  double beta = -1.0;
  double c_bar = 1.0;
};

struct SolutionLayout {
  std::size_t outer = 1;
  std::size_t inner = 1;
  std::size_t dim = 1;
};

// Discrete c_bar E sum e^{mu s + beta A_s} |Y|^2 dt + |beta| E sum e^{...} |Y|^2 dA
// + E sum e^{...} |Z|^2 dt over nodes 0..N-1, where s is remaining time and A_s
// is the push accumulated from the terminal-condition side. dA is
// [inner x N] (shared by outer paths) or empty. Returns the squared norm.
double weighted_norm(SolutionLayout layout, std::span<const double> Y, std::span<const double> Z,
                     std::span<const double> dA, const TimeGrid& grid, const WeightedNormConstants& k);

/// Mean over paths of sum_i (Y_i - S_i) dK_i. PreconditionError without obstacle.
double skorokhod_residual(const BdsdeSolution& sol);

EnergyStats energy_statistic(const BdsdeSolution& sol, const ReflectedPathBundle* bundle, double mu);

}  // namespace rgbdsde
