#include "rgbdsde/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rgbdsde/catalog.hpp"
#include "rgbdsde/digest.hpp"
#include "rgbdsde/error.hpp"
#include "rgbdsde/properties.hpp"

namespace rgbdsde {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ConfigError("unknown key \"" + k + "\" in " + where);
}

// Fills section defaults into user, rejecting keys that the defaults do not name.
json merge_section(const json& defaults, const json& user, const std::string& where) {
  json out = defaults;
  if (user.is_null()) return out;
  std::set<std::string> allowed;
  for (const auto& [k, v] : defaults.items()) allowed.insert(k);
  check_keys(user, allowed, where);
  for (const auto& [k, v] : user.items()) out[k] = v;
  return out;
}

std::size_t as_count(const json& j, const std::string& what) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) throw ConfigError(what + " must be an integer");
  const auto v = j.get<long long>();
  if (v < 0) throw ConfigError(what + " must be non-negative");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> n_list_of(const json& spec) {
  std::vector<std::size_t> out;
  for (const auto& v : spec.at("properties").at("n_list")) out.push_back(as_count(v, "properties.n_list entry"));
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
}

std::string solution_csv(const BdsdeSolution& s) {
  std::ostringstream os;
  os << "outer,inner,step,Y";
  for (std::size_t k = 0; k < s.dim; ++k) os << ",Z" << k;
  os << ",K,dA\n";
  const std::size_t N = s.steps();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t m = 0; m < s.inner; ++m)
      for (std::size_t i = 0; i <= N; ++i) {
        os << o << ',' << m << ',' << i << ',' << num(s.y(o, m, i));
        for (std::size_t k = 0; k < s.dim; ++k) os << ',' << (i < N ? num(s.Z[s.step(o, m, i) * s.dim + k]) : "");
        os << ',' << num(s.K[s.node(o, m, i)]) << ',';
        if (i < N) os << num(s.forward ? s.forward->da(m, i) : 0.0);
        os << '\n';
      }
  return os.str();
}

std::string paths_csv(const ReflectedPathBundle& b) {
  std::ostringstream os;
  os << "scenario,step";
  for (std::size_t k = 0; k < b.dim; ++k) os << ",X" << k;
  os << ",dA\n";
  for (std::size_t m = 0; m < b.scenarios; ++m)
    for (std::size_t i = 0; i <= b.steps; ++i) {
      os << m << ',' << i;
      for (double v : b.x(m, i)) os << ',' << num(v);
      os << ',' << (i < b.steps ? num(b.da(m, i)) : "") << '\n';
    }
  return os.str();
}

std::string probe_columns(std::size_t d) {
  if (d == 1) return "x";
  std::string s;
  for (std::size_t k = 0; k < d; ++k) s += (k ? ",x" : "x") + std::to_string(k);
  return s;
}

std::string probe_values(const ProbePoint& p) {
  std::string s = num(p.t);
  for (double v : p.x) s += "," + num(v);
  return s;
}

void write_field(const fs::path& dir, const FieldTable& t, std::vector<std::string>& outputs) {
  const std::size_t d = t.probes.empty() ? 1 : t.probes[0].x.size();
  std::ostringstream os, agg;
  os << "t," << probe_columns(d) << ",outer_path,value\n";
  for (std::size_t p = 0; p < t.probes.size(); ++p)
    for (std::size_t o = 0; o < t.outer; ++o) os << probe_values(t.probes[p]) << ',' << o << ',' << num(t.value(o, p)) << '\n';
  agg << "t," << probe_columns(d) << ",mean,sd\n";
  for (std::size_t p = 0; p < t.probes.size(); ++p)
    agg << probe_values(t.probes[p]) << ',' << num(t.mean[p]) << ',' << num(t.sd[p]) << '\n';
  write_text(dir / "field.csv", os.str());
  write_text(dir / "field_aggregate.csv", agg.str());
  outputs.push_back("field.csv");
  outputs.push_back("field_aggregate.csv");
}

json energy_json(const EnergyStats& e) {
  return json{{"e_sup", e.e_sup}, {"e_dA", e.e_dA}, {"e_Z", e.e_Z}, {"e_K", e.e_K}, {"total", e.total()}};
}

json assumptions_json(const AssumptionReport& r) {
  return json{{"samples", r.samples},
              {"f_lipschitz_sq", r.f_lipschitz_sq},
              {"g_y_quotient_sq", r.g_y_quotient_sq},
              {"g_z_quotient_sq", r.g_z_quotient_sq},
              {"phi_monotonicity", r.phi_monotonicity},
              {"growth_ratio", r.growth_ratio},
              {"violations", r.violations}};
}

AssumptionReport check_assumptions(const ExperimentSpec& spec, const Problem& problem, const SolverConfig& cfg) {
  SamplingBox box;
  box.horizon = cfg.grid.horizon;
  if (problem.forward) {
    const Domain& d = problem.forward->domain;
    box.x_dim = d.dimension();
    box.z_dim = d.dimension();
    box.x_lo = d.is_interval() ? d.lo() : *std::min_element(d.center().begin(), d.center().end()) - d.radius();
    box.x_hi = d.is_interval() ? d.hi() : *std::max_element(d.center().begin(), d.center().end()) + d.radius();
  } else {
    box.x_dim = 0;
    box.z_dim = cfg.w_dim;
  }
  const auto budget = as_count(spec.resolved.at("validation").at("budget"), "validation.budget");
  return validate_assumptions(problem.coeffs, problem.obstacle, budget, spec.seed, box);
}

json run_solve(const ExperimentSpec& spec, const fs::path& dir, std::vector<std::string>& outputs) {
  const Problem problem = build_problem(spec);
  const SolverConfig cfg = build_solver_config(spec);
  const AssumptionReport assumptions = check_assumptions(spec, problem, cfg);
  const NoisePaths noise = sample_paths_for(problem, cfg);
  const std::string variant = spec.resolved.at("solver").at("variant").get<std::string>();
  json metrics;
  BdsdeSolution sol;
  if (variant == "plain") {
    sol = solve_plain(problem, noise, cfg);
  } else if (variant == "penalized") {
    if (!cfg.penalty_n) throw ConfigError("solver.variant \"penalized\" requires solver.penalty_n");
    sol = solve_penalized(problem, *cfg.penalty_n, noise, cfg);
    metrics["penalty_n"] = *cfg.penalty_n;
  } else if (variant == "reflected") {
    sol = solve_reflected(problem, noise, cfg);
  } else {
    PicardResult pr = picard_solve(problem, noise, cfg);
    metrics["picard_deltas"] = pr.deltas;
    sol = std::move(pr.solution);
  }
  double y0 = 0.0, kt = 0.0;
  for (std::size_t o = 0; o < sol.outer; ++o) {
    y0 += sol.y_mean(o, 0) / static_cast<double>(sol.outer);
    for (std::size_t m = 0; m < sol.inner; ++m) kt += sol.k_total(o, m) / static_cast<double>(sol.paths());
  }
  metrics["y_start_mean"] = y0;
  metrics["k_total_mean"] = kt;
  metrics["skorokhod_residual"] = sol.diagnostics.skorokhod_residual;
  if (sol.has_obstacle) metrics["min_gap"] = sol.diagnostics.min_gap;
  metrics["energy"] = energy_json(sol.diagnostics.energy);
  if (sol.forward) {
    double a = 0.0;
    for (double v : sol.forward->A_total) a += v / static_cast<double>(sol.forward->scenarios);
    metrics["local_time_mean"] = a;
    write_text(dir / "paths.csv", paths_csv(*sol.forward));
    outputs.push_back("paths.csv");
  }
  write_text(dir / "solution.csv", solution_csv(sol));
  outputs.push_back("solution.csv");
  json diag = {{"variant", sol.diagnostics.variant}, {"metrics", metrics}, {"assumptions", assumptions_json(assumptions)}};
  write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
  outputs.push_back("diagnostics.json");
  metrics["assumption_violations"] = assumptions.violations.size();
  return json{{"metrics", metrics}, {"pass", true}};
}

json run_field(const ExperimentSpec& spec, const fs::path& dir, std::vector<std::string>& outputs, FieldTable* keep) {
  if (!spec.field_problem) throw ConfigError("field command requires \"problem\": \"field\"");
  const FieldProblem problem = build_field_problem(spec);
  const auto probes = build_probes(spec);
  if (probes.empty()) throw ConfigError("field command requires a non-empty probe list");
  const FieldTable table = evaluate_field(problem, probes, build_solver_config(spec));
  write_field(dir, table, outputs);
  json metrics;
  metrics["probe_means"] = table.mean;
  metrics["field_hash"] = table.config_hash;
  if (keep) *keep = table;
  return json{{"metrics", metrics}, {"pass", true}};
}

json run_oracle(const ExperimentSpec& spec, const fs::path& dir, std::vector<std::string>& outputs) {
  FieldTable table;
  run_field(spec, dir, outputs, &table);
  const FieldProblem problem = build_field_problem(spec);
  if (!problem.domain.is_interval()) throw ConfigError("oracle command requires a 1D interval domain");
  const json& o = spec.resolved.at("oracle");
  const SolverConfig cfg = build_solver_config(spec);
  const FdMesh mesh = make_mesh(problem.domain.lo(), problem.domain.hi(), as_count(o.at("J"), "oracle.J"),
                                cfg.grid.horizon, as_count(o.at("N_fd"), "oracle.N_fd"));
  const FdSolution fd = solve_obstacle_pde_1d(problem.coeffs, problem.obstacle, problem.diffusion, mesh);
  const ErrorReport err = compare_mc_fd(table, fd);

  std::ostringstream os;
  os << "t,x,u\n";
  for (std::size_t k = 0; k <= mesh.steps; ++k)
    for (std::size_t j = 0; j <= mesh.intervals; ++j)
      os << num(mesh.dt() * static_cast<double>(k)) << ',' << num(mesh.node(j)) << ',' << num(fd.at_node(k, j)) << '\n';
  write_text(dir / "fd.csv", os.str());
  outputs.push_back("fd.csv");

  json rows = json::array();
  for (const auto& r : err.rows)
    rows.push_back(json{{"t", r.probe.t}, {"x", r.probe.x}, {"mc", r.mc}, {"fd", r.fd}, {"abs_error", r.abs_error},
                        {"rel_error", r.rel_error}});
  const double tol = o.at("tolerance").get<double>();
  json report = {{"fd_range", err.fd_range}, {"max_abs_error", err.max_abs_error},
                 {"max_relative_error", err.max_rel_error}, {"tolerance", tol}, {"rows", rows},
                 {"warnings", fd.warnings}};
  write_text(dir / "compare.json", report.dump(2) + "\n");
  outputs.push_back("compare.json");
  json metrics = {{"max_relative_error", err.max_rel_error}, {"max_abs_error", err.max_abs_error},
                  {"fd_range", err.fd_range}};
  return json{{"metrics", metrics}, {"pass", err.max_rel_error <= tol}};
}

json run_properties(const ExperimentSpec& spec, const fs::path& dir, std::vector<std::string>& outputs) {
  const Problem problem = build_problem(spec);
  const SolverConfig cfg = build_solver_config(spec);
  const json& props = spec.resolved.at("properties");
  const auto n_list = n_list_of(spec.resolved);
  json reports = json::array();
  bool all = true;
  for (const auto& item : props.at("suite")) {
    const std::string name = item.get<std::string>();
    PropertyReport r;
    try {
      if (name == "comparison") {
        Problem dominating = problem;
        const double delta = props.at("delta").get<double>();
        dominating.coeffs.terminal = [base = problem.coeffs.terminal, delta](PointView x) { return base(x) + delta; };
        r = comparison_check(problem, dominating, cfg);
      } else if (name == "monotone") {
        r = penalization_monotone_check(problem, n_list, cfg);
      } else if (name == "convergence") {
        r = convergence_check(problem, n_list, cfg);
      } else if (name == "energy") {
        r = energy_bound_check(problem, n_list, props.at("mu").get<double>(), cfg);
      } else {
        throw ConfigError("unknown property \"" + name + "\"");
      }
    } catch (const PreconditionError& e) {
      r.name = name;
      r.pass = false;
      r.details = json{{"refused", e.what()}};
    }
    all = all && r.pass;
    reports.push_back(to_json(r));
  }
  write_text(dir / "properties.json", json{{"reports", reports}, {"pass", all}}.dump(2) + "\n");
  outputs.push_back("properties.json");
  json metrics = json::object();
  for (const auto& r : reports) metrics[r["name"].get<std::string>()] = r["pass"];
  return json{{"metrics", metrics}, {"pass", all}};
}

// Compares metrics against expected values. Names are dotted paths such as
// "energy.total" or "probe_means.0".
json check_expectations(const json& expect, const json& metrics, bool& pass) {
  json out = json::array();
  for (const auto& [name, e] : expect.items()) {
    const json* node = &metrics;
    std::string rest = name;
    while (node && !rest.empty()) {
      const auto dot = rest.find('.');
      const std::string key = rest.substr(0, dot);
      rest = dot == std::string::npos ? "" : rest.substr(dot + 1);
      if (node->is_object()) {
        node = node->contains(key) ? &(*node)[key] : nullptr;
      } else if (node->is_array() && !key.empty() && key.find_first_not_of("0123456789") == std::string::npos &&
                 std::stoul(key) < node->size()) {
        node = &(*node)[std::stoul(key)];
      } else {
        node = nullptr;
      }
    }
    const double want = e["value"].get<double>(), tol = e["tol"].get<double>();
    json row = {{"metric", name}, {"expected", want}, {"tol", tol}};
    bool ok = false;
    if (node && node->is_number()) {
      const double got = node->get<double>();
      row["observed"] = got;
      row["abs_error"] = std::abs(got - want);
      ok = std::abs(got - want) <= tol;
    } else {
      row["observed"] = nullptr;
    }
    row["pass"] = ok;
    pass = pass && ok;
    out.push_back(row);
  }
  return out;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "solve") return Command::solve;
  if (name == "field") return Command::field;
  if (name == "oracle") return Command::oracle;
  if (name == "properties") return Command::properties;
  throw ConfigError("unknown command \"" + name + "\"");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::field: return "field";
    case Command::oracle: return "oracle";
    case Command::properties: return "properties";
  }
  return "?";
}

json default_config() {
  return json{
      {"problem", "abstract"},
      {"coefficients", {{"family", "zero"}, {"params", json::object()}}},
      {"obstacle", {{"family", "none"}, {"params", json::object()}}},
      {"domain", {{"kind", "interval"}, {"lo", 0.0}, {"hi", 1.0}}},
      {"diffusion", {{"start", {0.5}}, {"drift0", 0.0}, {"drift1", 0.0}, {"sigma", 1.0}}},
      {"solver",
       {{"T", 1.0}, {"N", 64}, {"M_inner", 4096}, {"M_outer", 1}, {"degree", 2}, {"variant", "reflected"},
        {"penalty_n", nullptr}, {"picard_max", 20}, {"picard_tol", 1e-8}, {"w_dim", 1}}},
      {"probes", json::array()},
      {"properties",
       {{"suite", {"comparison", "monotone", "convergence", "energy"}}, {"n_list", {1, 10, 100}}, {"delta", 1.0},
        {"mu", 1.0}}},
      {"oracle", {{"J", 200}, {"N_fd", 256}, {"tolerance", 0.05}}},
      {"validation", {{"budget", 1000}}},
      {"expect", json::object()},
  };
}

ExperimentSpec parse_config(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(),
                                                                      text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size())), '\n'));
    throw ConfigError("config parse error at line " + std::to_string(line) + ": " + e.what());
  }
  const json defaults = default_config();
  std::set<std::string> top;
  for (const auto& [k, v] : defaults.items()) top.insert(k);
  top.insert("seed");
  top.insert("output");
  check_keys(user, top, "config");

  ExperimentSpec spec;
  json r = defaults;
  for (const auto& [k, v] : user.items()) {
    if (k == "seed" || k == "output") continue;
    if (k == "problem") {
      r[k] = v;
    } else if (k == "probes") {
      r[k] = v;
    } else if (k == "expect") {
      if (!v.is_object()) throw ConfigError("expect must be a JSON object");
      for (const auto& [name, e] : v.items()) {
        check_keys(e, {"value", "tol"}, "expect." + name);
        if (!e.contains("value") || !e["value"].is_number() || !e.contains("tol") || !e["tol"].is_number())
          throw ConfigError("expect." + name + " needs numeric \"value\" and \"tol\"");
      }
      r[k] = v;
    } else if (k == "domain") {
      json d = v;
      if (!d.is_object()) throw ConfigError("domain must be a JSON object");
      if (!d.contains("kind")) d["kind"] = "interval";
      r[k] = d;
    } else {
      r[k] = merge_section(defaults.at(k), v, k);
    }
  }
  if (!user.contains("seed") && !seed_override) throw ConfigError("config is missing the required \"seed\"");
  spec.seed = seed_override ? *seed_override : as_count(user.at("seed"), "seed");
  r["seed"] = spec.seed;
  if (user.contains("output")) {
    if (!user["output"].is_string()) throw ConfigError("output must be a string");
    spec.output_dir = user["output"].get<std::string>();
  }
  const std::string problem = r.at("problem").is_string() ? r.at("problem").get<std::string>() : "";
  if (problem != "abstract" && problem != "field") throw ConfigError("problem must be \"abstract\" or \"field\"");
  spec.field_problem = problem == "field";
  const std::string variant = r.at("solver").at("variant").is_string() ? r["solver"]["variant"].get<std::string>() : "";
  if (variant != "plain" && variant != "penalized" && variant != "reflected" && variant != "picard")
    throw ConfigError("solver.variant must be one of plain, penalized, reflected, picard");
  check_keys(r.at("coefficients"), {"family", "params"}, "coefficients");
  check_keys(r.at("obstacle"), {"family", "params"}, "obstacle");
  spec.resolved = r;

  // Building every object validates families, parameters and shapes up front.
  build_problem(spec);
  build_solver_config(spec);
  build_probes(spec);
  n_list_of(spec.resolved);
  spec.digest = fnv1a_hex(spec.resolved.dump());
  return spec;
}

ExperimentSpec load_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  if (!seed_override) seed_override = seed_from_env();
  return parse_config(ss.str(), seed_override);
}

Problem build_problem(const ExperimentSpec& spec) {
  const json& r = spec.resolved;
  Problem p;
  p.coeffs = catalog::coefficients(r.at("coefficients").at("family").get<std::string>(), r["coefficients"]["params"]);
  p.obstacle = catalog::obstacle(r.at("obstacle").at("family").get<std::string>(), r["obstacle"]["params"]);
  if (spec.field_problem) {
    Domain d = catalog::domain(r.at("domain"));
    DiffusionSpec diff = catalog::diffusion(r.at("diffusion"));
    if (diff.start.size() != d.dimension()) throw ConfigError("diffusion.start dimension does not match the domain");
    p.forward = ForwardModel{std::move(d), std::move(diff)};
  }
  return p;
}

FieldProblem build_field_problem(const ExperimentSpec& spec) {
  Problem p = build_problem(spec);
  if (!p.forward) throw ConfigError("a field problem needs \"problem\": \"field\"");
  return FieldProblem{p.coeffs, p.obstacle, p.forward->domain, p.forward->diffusion};
}

SolverConfig build_solver_config(const ExperimentSpec& spec) {
  const json& s = spec.resolved.at("solver");
  SolverConfig c;
  if (!s.at("T").is_number()) throw ConfigError("solver.T must be a number");
  c.grid = make_grid(s["T"].get<double>(), as_count(s.at("N"), "solver.N"));
  c.m_inner = as_count(s.at("M_inner"), "solver.M_inner");
  c.m_outer = as_count(s.at("M_outer"), "solver.M_outer");
  c.degree = static_cast<int>(as_count(s.at("degree"), "solver.degree"));
  c.w_dim = as_count(s.at("w_dim"), "solver.w_dim");
  if (!s.at("penalty_n").is_null()) c.penalty_n = as_count(s["penalty_n"], "solver.penalty_n");
  c.picard_max = as_count(s.at("picard_max"), "solver.picard_max");
  if (!s.at("picard_tol").is_number()) throw ConfigError("solver.picard_tol must be a number");
  c.picard_tol = s["picard_tol"].get<double>();
  c.seed = spec.seed;
  c.threads = spec.threads;
  const std::size_t feature_dim = spec.field_problem ? catalog::domain(spec.resolved.at("domain")).dimension() : 0;
  c.validate(feature_dim);
  return c;
}

std::vector<ProbePoint> build_probes(const ExperimentSpec& spec) {
  std::vector<ProbePoint> out;
  const json& probes = spec.resolved.at("probes");
  if (!probes.is_array()) throw ConfigError("probes must be an array of [t, x...] entries");
  for (const auto& p : probes) {
    if (!p.is_array() || p.size() < 2) throw ConfigError("each probe must be [t, x...]");
    ProbePoint q;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!p[k].is_number()) throw ConfigError("probe entries must be numbers");
      if (k == 0) q.t = p[k].get<double>();
      else q.x.push_back(p[k].get<double>());
    }
    out.push_back(std::move(q));
  }
  return out;
}

RunManifest run_experiment(const ExperimentSpec& spec, Command command) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(spec.output_dir);
  std::vector<std::string> outputs;
  json manifest = {{"schema", kManifestSchema}, {"version", kVersion},   {"command", command_name(command)},
                   {"digest", spec.digest},     {"seed", spec.seed},      {"config", spec.resolved}};
  try {
    json result;
    switch (command) {
      case Command::solve: result = run_solve(spec, spec.output_dir, outputs); break;
      case Command::field: result = run_field(spec, spec.output_dir, outputs, nullptr); break;
      case Command::oracle: result = run_oracle(spec, spec.output_dir, outputs); break;
      case Command::properties: result = run_properties(spec, spec.output_dir, outputs); break;
    }
    manifest["status"] = "ok";
    manifest["metrics"] = result["metrics"];
    bool pass = result["pass"].get<bool>();
    if (!spec.resolved.at("expect").empty())
      manifest["expectations"] = check_expectations(spec.resolved["expect"], result["metrics"], pass);
    manifest["pass"] = pass;
  } catch (const std::exception& e) {
    manifest["status"] = "error";
    manifest["error"] = e.what();
    manifest["pass"] = false;
  }
  manifest["outputs"] = outputs;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["timings"] = {{"total_seconds", seconds}};
  write_text(spec.output_dir / "manifest.json", manifest.dump(2) + "\n");
  return RunManifest{manifest};
}

std::string SummaryTable::to_csv() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
    os << '\n';
  }
  os << "aggregate," << (pass ? "pass" : "fail") << '\n';
  return os.str();
}

SummaryTable summarize(const std::vector<json>& manifests) {
  if (manifests.empty()) throw ConfigError("summarize: no manifests given");
  std::vector<json> ordered = manifests;
  const bool sweep = std::all_of(ordered.begin(), ordered.end(), [](const json& m) {
    return m.contains("metrics") && m["metrics"].is_object() && m["metrics"].contains("penalty_n");
  });
  if (sweep)
    std::stable_sort(ordered.begin(), ordered.end(), [](const json& a, const json& b) {
      return a["metrics"]["penalty_n"].get<double>() < b["metrics"]["penalty_n"].get<double>();
    });

  SummaryTable t;
  t.header = {"digest", "seed", "command", "status", "metrics", "pass"};
  for (const auto& m : ordered) {
    std::string metrics;
    if (m.contains("metrics") && m["metrics"].is_object())
      for (const auto& [k, v] : m["metrics"].items())
        if (v.is_number() || v.is_boolean()) metrics += (metrics.empty() ? "" : ";") + k + "=" + v.dump();
    const bool pass = m.value("pass", false);
    t.pass = t.pass && pass;
    t.rows.push_back({m.value("digest", ""), m.contains("seed") ? m["seed"].dump() : "", m.value("command", ""),
                      m.value("status", ""), metrics, pass ? "pass" : "fail"});
  }
  return t;
}

}  // namespace rgbdsde
