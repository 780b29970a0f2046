#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "rgbdsde/catalog.hpp"
#include "rgbdsde/error.hpp"
#include "rgbdsde/experiment.hpp"
#include "rgbdsde/properties.hpp"
#include "rgbdsde/regression.hpp"

namespace py = pybind11;
using namespace rgbdsde;
using nlohmann::json;

namespace {

py::array_t<double> to_array(const std::vector<double>& v, std::vector<py::ssize_t> shape) {
  py::array_t<double> a(shape);
  std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(double));
  return a;
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

ExperimentSpec spec_from(const py::object& config, std::optional<std::uint64_t> seed) {
  const std::string text =
      py::isinstance<py::str>(config) ? config.cast<std::string>() : from_py(config).dump();
  return parse_config(text, seed);
}

}  // namespace

PYBIND11_MODULE(_rgbdsde, m) {
  m.doc() = "Monte Carlo solver for reflected backward doubly stochastic equations";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def_readonly("horizon", &TimeGrid::horizon)
      .def_readonly("steps", &TimeGrid::steps)
      .def_readonly("dt", &TimeGrid::dt)
      .def_readonly("times", &TimeGrid::times);
  m.def("make_grid", &make_grid, py::arg("horizon"), py::arg("steps"));

  m.def(
      "sample_paths",
      [](double horizon, std::size_t steps, std::size_t w_dim, std::size_t b_dim, std::size_t inner,
         std::size_t outer, std::uint64_t seed) {
        auto p = sample_paths(make_grid(horizon, steps), w_dim, b_dim, inner, outer, seed);
        const auto N = static_cast<py::ssize_t>(steps);
        return py::make_tuple(
            to_array(p.w_increments, {static_cast<py::ssize_t>(inner), N, static_cast<py::ssize_t>(w_dim)}),
            to_array(p.b_increments, {static_cast<py::ssize_t>(outer), N, static_cast<py::ssize_t>(b_dim)}));
      },
      py::arg("horizon"), py::arg("steps"), py::arg("w_dim"), py::arg("b_dim"), py::arg("inner"), py::arg("outer"),
      py::arg("seed"), "Gaussian increments (W [inner, N, d], B [outer, N, l]).");

  m.def(
      "project",
      [](const py::dict& domain, std::vector<double> x) {
        auto d = catalog::domain(from_py(domain));
        auto p = d.project(x);
        return py::make_tuple(p.point, p.displacement);
      },
      py::arg("domain"), py::arg("x"));

  m.def(
      "simulate_reflected",
      [](const py::dict& domain, const py::dict& diffusion, double horizon, std::size_t steps, std::size_t scenarios,
         std::uint64_t seed) {
        auto dom = catalog::domain(from_py(domain));
        auto diff = catalog::diffusion(from_py(diffusion));
        auto grid = make_grid(horizon, steps);
        auto noise = sample_paths(grid, dom.dimension(), 1, scenarios, 1, seed);
        auto b = simulate_reflected(diff, dom, grid, noise);
        py::dict out;
        out["X"] = to_array(b.X, {static_cast<py::ssize_t>(b.scenarios), static_cast<py::ssize_t>(steps + 1),
                                  static_cast<py::ssize_t>(b.dim)});
        out["dA"] = to_array(b.dA, {static_cast<py::ssize_t>(b.scenarios), static_cast<py::ssize_t>(steps)});
        out["A_total"] = to_array(b.A_total, {static_cast<py::ssize_t>(b.scenarios)});
        return out;
      },
      py::arg("domain"), py::arg("diffusion"), py::arg("horizon"), py::arg("steps"), py::arg("scenarios"),
      py::arg("seed"));

  m.def(
      "regress",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> features,
         py::array_t<double, py::array::c_style | py::array::forcecast> targets, int degree) {
        if (features.ndim() != 2) throw ConfigError("features must be a 2D array");
        const auto rows = static_cast<std::size_t>(features.shape(0));
        const auto dim = static_cast<std::size_t>(features.shape(1));
        if (static_cast<std::size_t>(targets.size()) != rows) throw ConfigError("targets must have one entry per row");
        auto r = regress_conditional({features.data(), rows * dim}, dim, {targets.data(), rows}, degree);
        return py::make_tuple(to_array(r.coeffs, {static_cast<py::ssize_t>(r.coeffs.size())}),
                              to_array(r.fitted, {static_cast<py::ssize_t>(rows)}));
      },
      py::arg("features"), py::arg("targets"), py::arg("degree") = 2);

  m.def(
      "parse_config",
      [](const py::object& config, std::optional<std::uint64_t> seed) {
        auto s = spec_from(config, seed);
        py::dict out;
        out["resolved"] = to_py(s.resolved);
        out["digest"] = s.digest;
        out["seed"] = s.seed;
        return out;
      },
      py::arg("config"), py::arg("seed") = py::none(), "Validate a config (dict or JSON text) and fill defaults.");

  m.def("default_config", [] { return to_py(default_config()); });

  m.def(
      "solve",
      [](const py::object& config, std::optional<std::uint64_t> seed) {
        auto spec = spec_from(config, seed);
        auto problem = build_problem(spec);
        auto cfg = build_solver_config(spec);
        auto noise = sample_paths_for(problem, cfg);
        const auto variant = spec.resolved["solver"]["variant"].get<std::string>();
        BdsdeSolution sol;
        {
          py::gil_scoped_release release;
          if (variant == "plain") {
            sol = solve_plain(problem, noise, cfg);
          } else if (variant == "penalized") {
            if (!cfg.penalty_n) throw ConfigError("penalized variant needs solver.penalty_n");
            sol = solve_penalized(problem, *cfg.penalty_n, noise, cfg);
          } else if (variant == "reflected") {
            sol = solve_reflected(problem, noise, cfg);
          } else {
            sol = picard_solve(problem, noise, cfg).solution;
          }
        }
        const auto O = static_cast<py::ssize_t>(sol.outer), M = static_cast<py::ssize_t>(sol.inner);
        const auto N = static_cast<py::ssize_t>(sol.steps());
        py::dict out;
        out["Y"] = to_array(sol.Y, {O, M, N + 1});
        out["K"] = to_array(sol.K, {O, M, N + 1});
        out["Z"] = to_array(sol.Z, {O, M, N, static_cast<py::ssize_t>(sol.dim)});
        out["times"] = sol.grid.times;
        out["skorokhod_residual"] = sol.diagnostics.skorokhod_residual;
        out["min_gap"] = sol.diagnostics.min_gap;
        out["energy"] = py::dict(py::arg("e_sup") = sol.diagnostics.energy.e_sup,
                                 py::arg("e_dA") = sol.diagnostics.energy.e_dA,
                                 py::arg("e_Z") = sol.diagnostics.energy.e_Z,
                                 py::arg("e_K") = sol.diagnostics.energy.e_K);
        return out;
      },
      py::arg("config"), py::arg("seed") = py::none(), "Solve the configured problem; arrays are [outer, inner, node].");

  m.def(
      "evaluate_field",
      [](const py::object& config, std::optional<std::uint64_t> seed) {
        auto spec = spec_from(config, seed);
        auto table = evaluate_field(build_field_problem(spec), build_probes(spec), build_solver_config(spec));
        py::dict out;
        out["mean"] = table.mean;
        out["sd"] = table.sd;
        out["values"] = to_array(table.values, {static_cast<py::ssize_t>(table.outer),
                                                static_cast<py::ssize_t>(table.probes.size())});
        return out;
      },
      py::arg("config"), py::arg("seed") = py::none());

  m.def(
      "solve_fd",
      [](const py::object& config, std::size_t intervals, std::size_t steps) {
        auto spec = spec_from(config, std::nullopt);
        auto prob = build_field_problem(spec);
        if (!prob.domain.is_interval()) throw ConfigError("solve_fd needs an interval domain");
        auto mesh = make_mesh(prob.domain.lo(), prob.domain.hi(), intervals,
                              spec.resolved["solver"]["T"].get<double>(), steps);
        auto fd = solve_obstacle_pde_1d(prob.coeffs, prob.obstacle, prob.diffusion, mesh);
        return to_array(fd.u, {static_cast<py::ssize_t>(steps + 1), static_cast<py::ssize_t>(intervals + 1)});
      },
      py::arg("config"), py::arg("intervals") = 200, py::arg("steps") = 256,
      "Finite-difference solution u[k, j] at time k dt and node j.");

  m.def(
      "run_experiment",
      [](const py::object& config, const std::string& command, const std::string& out, unsigned threads,
         std::optional<std::uint64_t> seed) {
        auto spec = spec_from(config, seed);
        spec.output_dir = out;
        spec.threads = threads;
        RunManifest manifest;
        {
          py::gil_scoped_release release;
          manifest = run_experiment(spec, parse_command(command));
        }
        return to_py(manifest.data);
      },
      py::arg("config"), py::arg("command"), py::arg("out"), py::arg("threads") = 1, py::arg("seed") = py::none(),
      "Run solve | field | oracle | properties and return the manifest.");

  m.def("version", [] { return std::string(kVersion); });
}
