#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fluxq/cli.hpp"
#include "fluxq/lagrangian.hpp"
#include "fluxq/netlist.hpp"
#include "fluxq/quantize.hpp"
#include "fluxq/serialize.hpp"
#include "fluxq/simulate.hpp"
#include "fluxq/topology.hpp"

namespace py = pybind11;
using namespace fluxq;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::array_t<double> array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

Representation rep_of(const std::string& s) {
  if (s == "node") return Representation::NodeFlux;
  if (s == "loop") return Representation::LoopCharge;
  if (s == "extended") return Representation::ExtendedNodeFlux;
  throw py::value_error("rep must be node, loop or extended");
}

GeometricPolicy::Mode mode_of(const std::string& s) {
  if (s == "off") return GeometricPolicy::Mode::Off;
  if (s == "minimal") return GeometricPolicy::Mode::Minimal;
  if (s == "allpairs") return GeometricPolicy::Mode::AllPairs;
  throw py::value_error("geometric must be off, minimal or allpairs");
}

/// Augmented circuit, Lagrangian, Hamiltonian and normal modes in one place.
struct System {
  Augmentation aug;
  QuadraticLagrangian lag;
  HamiltonianSystem h;
  ModeDecomposition modes;
};

System quantize(const Circuit& circuit, const std::string& rep, const std::string& geometric, double cg, double lg) {
  GeometricPolicy policy;
  policy.mode = mode_of(geometric);
  policy.default_cg = cg;
  policy.default_lg = lg;
  System s;
  s.aug = augment_geometric(circuit, policy);
  s.lag = build_lagrangian(s.aug, rep_of(rep));
  s.h = legendre_transform(s.lag);
  s.modes = normal_modes(s.h);
  return s;
}

py::dict simulate(const System& s, double tmax, std::size_t samples, std::optional<std::map<std::string, double>> ics) {
  std::map<std::string, double> values = ics ? *ics : s.aug.design.initial_conditions();
  if (!ics && values.empty())
    for (const auto& c : s.aug.design.components()) values[c.id] = c.is_capacitor() ? 2e-3 : 0.0;
  const auto traj = evolve_modes(s.h, s.modes, initial_state(s.lag, values), uniform_times(tmax, samples));
  const auto obs = observables(s.lag, s.h, traj);
  py::dict voltage, current;
  for (std::size_t i = 0; i < obs.ids.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    voltage[py::str(obs.ids[i])] = Eigen::VectorXd(obs.voltage.col(col));
    current[py::str(obs.ids[i])] = Eigen::VectorXd(obs.current.col(col));
  }
  py::dict out;
  out["t"] = array(traj.times);
  out["coords"] = traj.coords;
  out["energy"] = array(traj.energy);
  out["voltage"] = voltage;
  out["current"] = current;
  return out;
}

}  // namespace

PYBIND11_MODULE(_fluxq, m) {
  m.doc() = "Lumped-circuit quantization core";
  m.attr("HBAR") = kHbar;

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TopologyError>(m, "TopologyError", PyExc_ValueError);
  py::register_exception<SingularKineticMatrix>(m, "Unquantizable", PyExc_ArithmeticError);
  py::register_exception<InconsistentInitialConditions>(m, "InconsistentInitialConditions", PyExc_ValueError);

  py::class_<Component>(m, "Component")
      .def_readonly("id", &Component::id)
      .def_property_readonly("kind", [](const Component& c) { return std::string(to_string(c.kind)); })
      .def_readonly("value", &Component::value)
      .def_readonly("node_a", &Component::node_a)
      .def_readonly("node_b", &Component::node_b)
      .def_readonly("geometric", &Component::geometric)
      .def("__repr__", [](const Component& c) {
        std::ostringstream s;
        s << "Component(" << c.id << ", " << to_string(c.kind) << ", " << c.value << ", " << c.node_a << ", "
          << c.node_b << ")";
        return s.str();
      });

  py::class_<Circuit>(m, "Circuit")
      .def_property_readonly("nodes", &Circuit::nodes)
      .def_property_readonly("components", &Circuit::components)
      .def_property_readonly("initial_conditions", &Circuit::initial_conditions)
      .def("to_netlist", &serialize_netlist)
      .def("validate",
           [](const Circuit& c) {
             std::vector<std::string> out;
             for (const auto& v : validate_circuit(c)) out.push_back(v.message);
             return out;
           })
      .def("__eq__", [](const Circuit& a, const Circuit& b) { return a == b; })
      .def("__len__", &Circuit::component_count);

  m.def("parse_netlist", [](const std::string& text) { return parse_netlist(text); }, py::arg("text"));
  m.def("load_netlist", &load_netlist, py::arg("path"));
  m.def(
      "analyze", [](const Circuit& c) { return to_python(topology_json(c, analyze_topology(c))); }, py::arg("circuit"),
      "Topology report: tree, chords, loops, passive nodes, loop deficiency, reducibility.");
  m.def(
      "reduce",
      [](const Circuit& c) {
        const auto r = reduce_circuit(c);
        return py::make_tuple(r.circuit, to_python(reduction_json(r)));
      },
      py::arg("circuit"), "Series/parallel reduction; returns (circuit, report).");

  py::class_<System>(m, "System")
      .def_property_readonly("representation",
                             [](const System& s) { return std::string(to_string(s.lag.representation)); })
      .def_property_readonly("labels", [](const System& s) { return s.lag.labels; })
      .def_property_readonly("mass", [](const System& s) { return s.lag.mass; })
      .def_property_readonly("stiffness", [](const System& s) { return s.lag.stiffness; })
      .def_property_readonly("omegas", [](const System& s) { return s.modes.omegas; })
      .def_property_readonly("mode_vectors", [](const System& s) { return s.modes.modes; })
      .def_property_readonly("zero_modes", [](const System& s) { return s.modes.zero_modes; })
      .def_property_readonly("added_capacitors", [](const System& s) { return s.aug.added_capacitors; })
      .def_property_readonly("frequencies_ghz",
                             [](const System& s) { return Eigen::VectorXd(s.modes.omegas.unaryExpr(&to_ghz)); })
      .def("report", [](const System& s) { return to_python(modes_json(s.h, s.modes)); })
      .def("uncertainty_products",
           [](const System& s) { return mode_uncertainty_products(ground_state(s.modes, s.h), s.modes, s.h); })
      .def("simulate", &simulate, py::arg("tmax") = 4e-9, py::arg("samples") = 2000, py::arg("ics") = py::none());

  m.def("quantize", &quantize, py::arg("circuit"), py::arg("rep") = "node", py::arg("geometric") = "minimal",
        py::arg("cg") = 8.9e-20, py::arg("lg") = 1e-15,
        "Augment, build the Lagrangian, Legendre-transform and find the normal modes.");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "fluxq");
        std::ostringstream out, err;
        const int code = cli::main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line interface in-process; returns (exit code, stdout, stderr).");
}
