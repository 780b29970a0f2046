#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include <json.hpp>

#include "rgbdsde/solver.hpp"

namespace rgbdsde {

// Outcome of one property check. pass holds iff worst_margin >= -tolerance
// (plus any check-specific conditions listed in details).
struct PropertyReport {
  std::string name;
  std::string digest;
  bool pass = false;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const PropertyReport& r);

/// Leave-one-out jackknife standard error of the sample mean; 0 for fewer than two values.
double jackknife_se(std::span<const double> values);

// Every check draws its own noise from config.seed, so all solves inside a
// check share it.

/// Ordering of non-reflected solutions under ordered data (same g). Throws
/// PreconditionError when sampling finds the data ordering violated.
PropertyReport comparison_check(const Problem& base, const Problem& dominating, const SolverConfig& config,
                                std::size_t sample_budget = 2000, std::uint64_t sample_seed = 7);

/// Y^{n_{k+1}} >= Y^{n_k} at every node, for a non-decreasing list of penalty indices.
PropertyReport penalization_monotone_check(const Problem& problem, std::span<const std::size_t> n_list,
                                           const SolverConfig& config);

/// Decay of sup (Y^n - S)^- and sup |Y^n - Y^{2n}| along the list, with a log-log slope fit.
PropertyReport convergence_check(const Problem& problem, std::span<const std::size_t> n_list,
                                 const SolverConfig& config);

/// Energy statistics per n; passes when the totals of the last two n agree within 10%.
PropertyReport energy_bound_check(const Problem& problem, std::span<const std::size_t> n_list, double mu,
                                  const SolverConfig& config);

}  // namespace rgbdsde
