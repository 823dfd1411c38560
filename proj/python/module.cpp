#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "stagpoint/classifier.hpp"
#include "stagpoint/datum_json.hpp"
#include "stagpoint/error.hpp"
#include "stagpoint/lagrangian.hpp"
#include "stagpoint/pde.hpp"
#include "stagpoint/presets.hpp"

namespace py = pybind11;
using namespace stagpoint;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

// A datum with its profile and time map, built once.
struct Solution {
  InitialDatum datum;
  std::shared_ptr<const EtaTimeMap> map;

  Solution(InitialDatum d, double quad_tol, double eta_gap) : datum(std::move(d)) {
    py::gil_scoped_release release;
    map = std::make_shared<EtaTimeMap>(build_map(datum, critical_profile(datum), quad_tol, eta_gap));
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lagrangian solver for the stagnation-point Euler equation";

  static py::exception<Error> error(m, "StagpointError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = static_cast<const py::object&>(error)(e.what());
      exc.attr("code") = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<InitialDatum>(m, "Datum")
      .def_property_readonly("bc", [](const InitialDatum& d) { return d.bc() == Bc::Dirichlet ? "dirichlet" : "periodic"; })
      .def("value", &InitialDatum::value)
      .def("slope", &InitialDatum::slope)
      .def("derivative", &InitialDatum::derivative, py::arg("alpha"), py::arg("order"))
      .def("to_dict", [](const InitialDatum& d) { return to_py(datum_to_json(d)); });

  m.def("preset", &preset, py::arg("name"));
  m.def("preset_names", &preset_names);
  m.def("datum_from_dict", [](const py::object& o) { return validate(datum_from_json(from_py(o))); }, py::arg("config"));
  m.def("validate", &validate, py::arg("datum"));
  m.def(
      "kbar",
      [](const InitialDatum& d, double eta, int b, double tol) { return kbar(d, critical_profile(d), eta, b, tol); },
      py::arg("datum"), py::arg("eta"), py::arg("b"), py::arg("tol") = 1e-12);
  m.def("c2_constant", &c2_constant, py::arg("k"), py::arg("m0"), py::arg("c1_abs"));
  m.def("c3_constant", &c3_constant, py::arg("k"), py::arg("m0"), py::arg("c1_abs"));

  py::class_<Solution>(m, "Solution")
      .def(py::init<InitialDatum, double, double>(), py::arg("datum"), py::arg("quad_tol") = 1e-12,
           py::arg("eta_gap") = 1e-10)
      .def_property_readonly("datum", [](const Solution& s) { return s.datum; })
      .def_property_readonly("eta_star", [](const Solution& s) { return s.map->eta_star(); })
      .def_property_readonly("t_star", [](const Solution& s) { return s.map->t_star(); })
      .def_property_readonly("finite_blowup", [](const Solution& s) { return s.map->finite_blowup(); })
      .def("eta_of_t", [](const Solution& s, double t) { return eta_of_t(*s.map, t); }, py::arg("t"))
      .def("t_of_eta", [](const Solution& s, double eta) { return s.map->t_of_eta(eta); }, py::arg("eta"))
      .def("ux", [](const Solution& s, double a, double t) { return ux_along(*s.map, a, t); }, py::arg("alpha"),
           py::arg("t"))
      .def("uxx", [](const Solution& s, double a, double t) { return uxx_along(*s.map, a, t); }, py::arg("alpha"),
           py::arg("t"))
      .def("uxxx", [](const Solution& s, double a, double t) { return uxxx_along(*s.map, a, t); }, py::arg("alpha"),
           py::arg("t"))
      .def("flow", [](const Solution& s, double a, double t) {
            const FlowPoint f = flow_map(*s.map, a, t);
            return py::make_tuple(f.gamma, f.gamma_alpha);
          }, py::arg("alpha"), py::arg("t"))
      .def("extrema", [](const Solution& s, double t) {
            const Extrema e = extrema(*s.map, t);
            return py::make_tuple(e.M, e.m);
          }, py::arg("t"))
      .def("nonlocal_term", [](const Solution& s, double t) { return nonlocal_term(*s.map, t); }, py::arg("t"))
      .def("eulerian_slice", [](const Solution& s, double t, std::size_t n) {
            const FieldSlice f = eulerian_slice(*s.map, t, n);
            return py::make_tuple(f.x_grid, f.ux_values);
          }, py::arg("t"), py::arg("n_points"))
      .def("verdict", [](const Solution& s) { return to_py(to_json(classify(*s.map, s.datum.bc()))); })
      .def("rates", [](const Solution& s, double lo, double hi, int samples) {
            const RegularityVerdict v = classify(*s.map, s.datum.bc());
            return to_py(to_json(verify_rates(v, *s.map, lo * s.map->eta_star(), hi * s.map->eta_star(), samples)));
          }, py::arg("lo") = 1e-8, py::arg("hi") = 1e-4, py::arg("samples") = 25)
      .def("compare_direct", [](const Solution& s, double t, std::size_t n) {
            DirectSolution d;
            {
              py::gil_scoped_release release;
              d = evolve_direct(s.datum, t, n);
            }
            return to_py(to_json(compare(d, *s.map, t)));
          }, py::arg("t"), py::arg("n_grid") = 256);
}
