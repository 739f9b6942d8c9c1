#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "avglab/bounds.hpp"
#include "avglab/config.hpp"
#include "avglab/experiments.hpp"
#include "avglab/lattice.hpp"

namespace py = pybind11;
using namespace avglab;

namespace {

py::dict summarize(const ScenarioResult& r) {
  py::dict out;
  out["scenario"] = r.scenario;
  out["passed"] = r.passed();
  py::dict checks;
  for (const auto& c : r.checks)
    checks[py::str(c.name)] = py::dict(py::arg("value") = c.value, py::arg("lower") = c.lower,
                                       py::arg("upper") = c.upper, py::arg("hard") = c.hard,
                                       py::arg("passed") = c.passed);
  out["checks"] = checks;
  py::dict metrics;
  for (const auto& name : r.metrics.columns) metrics[py::str(name)] = r.metrics.column(name);
  out["metrics"] = metrics;
  py::dict fits;
  for (const auto& [name, f] : r.fits)
    fits[py::str(name)] = py::dict(py::arg("slope") = f.slope, py::arg("intercept") = f.intercept,
                                   py::arg("r2") = f.r2, py::arg("points") = f.points);
  out["fits"] = fits;
  return out;
}

}  // namespace

PYBIND11_MODULE(_avglab, m) {
  m.doc() = "Spectral Galerkin solvers and averaging bounds for fast-mean-flow Burgers and Navier-Stokes";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<BlowUpError>(m, "BlowUpError", PyExc_RuntimeError);

  m.def("toy_ode_attractor", &toy_ode_attractor, py::arg("nu"), py::arg("alpha"));
  m.def("burgers_D", &burgers_D, py::arg("s"));
  m.def(
      "sum_S",
      [](int d, double p, int radius) {
        const Bracket b = sum_S(d, p, radius);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("d"), py::arg("p"), py::arg("radius") = 0, "Bracket (lower, upper) on 1 + sum |k|^-p.");
  m.def("log_norm", &log_norm_euclidean, py::arg("J"));
  m.def("gershgorin_log_norm", &gershgorin_log_norm, py::arg("J"));
  m.def(
      "nonresonance_scan",
      [](std::array<double, 2> alpha, int K) {
        const auto r = nonresonance_scan(alpha, K);
        return py::make_tuple(r.min_value, py::make_tuple(r.argmin[0], r.argmin[1]));
      },
      py::arg("alpha"), py::arg("K"));
  m.def(
      "absorbing_constants",
      [](double E_tilde, double nu, int i_max) {
        std::vector<double> out;
        for (const auto& s : burgers_absorbing_sequence(E_tilde, nu, ForcingSpec::none(1, 1), i_max, 0.0))
          out.push_back(s.C);
        return out;
      },
      py::arg("E_tilde"), py::arg("nu"), py::arg("i_max"), "Unforced absorbing envelope constants C_2, C_3, ...");

  m.def(
      "run_config",
      [](const std::string& text) {
        const RunConfig cfg = parse_config(text);
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(cfg);
        }
        return summarize(r);
      },
      py::arg("config_json"));
  m.def(
      "bounds_report",
      [](const std::string& text) {
        const BoundsReport report = make_bounds_report(parse_config(text));
        py::dict out;
        for (const auto& e : report.entries()) out[py::str(e.name)] = e.value;
        return out;
      },
      py::arg("config_json"));
  m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("config_json"), "Parsed config with every default filled in, as JSON.");
}
