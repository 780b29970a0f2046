#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rgbdsde/coefficients.hpp"
#include "rgbdsde/domain.hpp"
#include "rgbdsde/reflected.hpp"
#include "rgbdsde/solver.hpp"

namespace rgbdsde {

// u(t, x) at a list of probes, one value per outer B-path. A probe's t is the
// remaining time: the diffusion started at x runs for t before the terminal
// layer l(X) is read.
struct FieldTable {
  std::vector<ProbePoint> probes;
  std::size_t outer = 0;
  std::vector<double> values;  // [outer][probe]
  std::vector<double> mean;    // per probe, over outer paths
  std::vector<double> sd;      // per probe, over outer paths
  std::string config_hash;
  std::uint64_t seed = 0;

  double value(std::size_t o, std::size_t p) const { return values[o * probes.size() + p]; }
};

struct FieldProblem {
  CoefficientSet coeffs;
  ObstacleSpec obstacle;
  Domain domain;
  DiffusionSpec diffusion;  // start point is replaced by each probe's x
};

FieldTable evaluate_field(const FieldProblem& problem, std::span<const ProbePoint> probes, const SolverConfig& config);

struct FieldContinuityRow {
  ProbePoint first, second;
  std::vector<double> differences;  // |u1 - u2| per outer path
  double mean_difference = 0.0;
  double distance = 0.0;            // |t1 - t2| + |x1 - x2|
  double modulus = 0.0;             // mean_difference / distance (0 when distance = 0)
};

struct FieldContinuityReport {
  std::vector<FieldContinuityRow> rows;
  double max_modulus = 0.0;
};

/// Common-noise differences of the field between probe pairs.
FieldContinuityReport field_continuity_report(const FieldProblem& problem,
                                              std::span<const std::pair<ProbePoint, ProbePoint>> pairs,
                                              const SolverConfig& config);

}  // namespace rgbdsde
