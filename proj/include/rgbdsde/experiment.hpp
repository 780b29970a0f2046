#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgbdsde/field.hpp"
#include "rgbdsde/pde_oracle.hpp"
#include "rgbdsde/solver.hpp"

namespace rgbdsde {

inline constexpr int kManifestSchema = 1;
inline constexpr const char* kVersion = "0.1.0";

enum class Command { solve, field, oracle, properties };

Command parse_command(const std::string& name);
std::string command_name(Command c);

// Validated experiment description. `resolved` is the full configuration with
// every default filled in; the digest is computed from its canonical (sorted
// key) serialization, so reordering keys in the input does not change it.
struct ExperimentSpec {
  nlohmann::json resolved;
  std::string digest;
  std::uint64_t seed = 0;
  bool field_problem = false;
  std::filesystem::path output_dir = "out";
  unsigned threads = 1;
};

/// Parses, validates and defaults a JSON document. seed_override (for example
/// from --seed or RGBDSDE_SEED) replaces the configured seed.
ExperimentSpec parse_config(const std::string& text, std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentSpec load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Default configuration, as echoed by the CLI.
nlohmann::json default_config();

// Built objects for a spec.
Problem build_problem(const ExperimentSpec& spec);
FieldProblem build_field_problem(const ExperimentSpec& spec);
SolverConfig build_solver_config(const ExperimentSpec& spec);
std::vector<ProbePoint> build_probes(const ExperimentSpec& spec);

struct RunManifest {
  nlohmann::json data;  // written as manifest.json
  bool pass() const { return data.value("pass", false); }
};

/// Runs one command, writes its artifacts and manifest.json into the output
/// directory. Module errors are captured in the manifest (status "error").
RunManifest run_experiment(const ExperimentSpec& spec, Command command);

struct SummaryTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool pass = true;
  std::string to_csv() const;
};

SummaryTable summarize(const std::vector<nlohmann::json>& manifests);

}  // namespace rgbdsde
