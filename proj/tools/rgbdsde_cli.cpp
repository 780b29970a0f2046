// Experiment driver: solve, field, oracle, properties, summarize.
// Exit status: 0 pass, 1 fail or module error, 2 invalid configuration.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rgbdsde/error.hpp"
#include "rgbdsde/experiment.hpp"

namespace {

int run(const std::string& command, const std::string& config, std::optional<std::uint64_t> seed,
        const std::string& out, unsigned threads) {
  try {
    auto spec = rgbdsde::load_config(config, seed);
    if (!out.empty()) spec.output_dir = out;
    spec.threads = threads;
    const auto manifest = rgbdsde::run_experiment(spec, rgbdsde::parse_command(command));
    const auto& d = manifest.data;
    std::cout << command << ": status=" << d.value("status", "?") << " pass=" << (manifest.pass() ? "true" : "false")
              << " digest=" << d.value("digest", "") << " out=" << spec.output_dir.string() << "\n";
    if (d.contains("error")) std::cerr << "error: " << d["error"].get<std::string>() << "\n";
    return manifest.pass() ? 0 : 1;
  } catch (const rgbdsde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int summarize(const std::vector<std::string>& files, const std::string& out) {
  try {
    std::vector<nlohmann::json> manifests;
    for (const auto& f : files) {
      std::ifstream is(f);
      if (!is) throw rgbdsde::ConfigError("cannot read manifest " + f);
      manifests.push_back(nlohmann::json::parse(is));
    }
    const auto table = rgbdsde::summarize(manifests);
    const std::string csv = table.to_csv();
    if (out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream(out, std::ios::binary) << csv;
    }
    return table.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo solver for reflected backward doubly stochastic equations"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  int code = 0;

  for (const char* name : {"solve", "field", "oracle", "properties"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "experiment JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&, cmd = std::string(name)] { code = run(cmd, config, seed, out, threads); });
  }

  std::vector<std::string> manifests;
  auto* sum = app.add_subcommand("summarize", "tabulate manifest.json files");
  sum->add_option("manifests", manifests, "manifest files")->required();
  sum->add_option("--out", out, "CSV output path (stdout when omitted)");
  sum->callback([&] { code = summarize(manifests, out); });

  auto* defaults = app.add_subcommand("defaults", "print the default configuration");
  defaults->callback([] { std::cout << rgbdsde::default_config().dump(2) << "\n"; });

  CLI11_PARSE(app, argc, argv);
  return code;
}
