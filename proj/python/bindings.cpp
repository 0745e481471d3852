#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nematic/driver.hpp"
#include "nematic/errors.hpp"
#include "nematic/solenoidal.hpp"

namespace py = pybind11;
using namespace nematic;

namespace {

// grid storage is x-fastest, so the numpy shape is the extent reversed
std::vector<py::ssize_t> array_shape(const Grid& g) {
  const IntVec& e = g.extent();
  if (g.dim() == 2) return {e[1], e[0]};
  return {e[2], e[1], e[0]};
}

py::array_t<double> to_array(const Grid& g, const Field& f) {
  py::array_t<double> a(array_shape(g));
  std::copy(f.begin(), f.end(), a.mutable_data());
  return a;
}

Field from_array(const Grid& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (static_cast<std::size_t>(a.size()) != g.size()) throw DimensionError("array size does not match the grid");
  return Field(a.data(), a.data() + a.size());
}

py::list arrays(const Grid& g, const VectorField& v) {
  py::list out;
  for (const auto& c : v) out.append(to_array(g, c));
  return out;
}

py::dict state_dict(const Grid& g, const FieldState& s) {
  py::dict d;
  d["u"] = arrays(g, s.u);
  d["d"] = arrays(g, s.d);
  d["theta"] = to_array(g, s.theta);
  d["p"] = to_array(g, s.p);
  d["time"] = s.time;
  return d;
}

py::dict ledger_dict(const EnergyLedger& l) {
  py::dict d;
  d["time"] = l.time;
  d["kinetic"] = l.kinetic;
  d["thermal"] = l.thermal;
  d["elastic"] = l.elastic;
  d["penalty"] = l.penalty;
  d["entropy"] = l.entropy ? py::object(py::float_(*l.entropy)) : py::none();
  d["production_dir"] = l.production_dir;
  d["min_theta"] = l.min_theta;
  d["max_theta"] = l.max_theta;
  d["max_d_sq"] = l.max_d_sq;
  d["energy_drift"] = l.energy_drift;
  return d;
}

}  // namespace

PYBIND11_MODULE(nematic, m) {
  m.doc() = "Galerkin solver for non-isothermal nematic liquid crystal flow";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<RunConfig>(m, "Config")
      .def_property_readonly("dim", [](const RunConfig& c) { return c.domain.dim; })
      .def_property_readonly("resolution", [](const RunConfig& c) { return c.domain.resolution; })
      .def_property_readonly("n_modes", [](const RunConfig& c) { return c.galerkin.levels.n; })
      .def_property_readonly("m_modes", [](const RunConfig& c) { return c.galerkin.levels.m; })
      .def_property_readonly("dt", [](const RunConfig& c) { return c.galerkin.dt; })
      .def_property_readonly("t_end", [](const RunConfig& c) { return c.galerkin.t_end; })
      .def("dump", &dump_config)
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });

  m.def("parse_config", [](const std::string& text, const std::vector<std::string>& overrides) {
    return parse_config(text, overrides);
  }, py::arg("text"), py::arg("overrides") = std::vector<std::string>{});
  m.def("load_config", [](const std::string& path, const std::vector<std::string>& overrides) {
    return load_config(path, overrides);
  }, py::arg("path"), py::arg("overrides") = std::vector<std::string>{});

  m.def("initial_state", [](const RunConfig& c) {
    const Grid g(c.domain);
    return state_dict(g, make_initial(c.initial, g, c.laws()));
  }, "Initial fields of a config as numpy arrays (shape ny, nx in 2D).");

  m.def("leray_project", [](const RunConfig& c, const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& u) {
    const Grid g(c.domain);
    VectorField v;
    for (const auto& a : u) v.push_back(from_array(g, a));
    g.check_shape(v, g.dim(), "velocity");
    return arrays(g, leray_project(g, v));
  }, py::arg("config"), py::arg("u"));

  m.def("viscosity", [](const RunConfig& c, double theta) { return c.laws().viscosity(theta); });
  m.def("dilatation", [](const RunConfig& c, double theta) { return c.laws().dilatation(theta); });

  m.def("run", [](const RunConfig& c, const std::string& out_dir) {
    RunOutcome out;
    {
      py::gil_scoped_release release;
      out = run_command(c, out_dir);
    }
    const Grid g(c.domain);
    py::dict r;
    r["exit_code"] = out.exit_code;
    r["summary_json"] = out.summary_json;
    py::list ledgers;
    for (const auto& l : out.result.ledgers) ledgers.append(ledger_dict(l));
    r["ledgers"] = ledgers;
    py::dict inv;
    for (const auto& i : out.invariants) inv[py::str(i.name)] = py::make_tuple(i.passed, i.worst, i.tolerance);
    r["invariants"] = inv;
    r["final_state"] = state_dict(g, out.result.final_state);
    r["aborted"] = out.result.abort.has_value();
    return r;
  }, py::arg("config"), py::arg("out_dir"));

  m.def("study", [](const RunConfig& c, const std::vector<std::size_t>& n_list, const std::vector<std::size_t>& m_list,
                    const std::string& out_dir) {
    StudyReport rep;
    {
      py::gil_scoped_release release;
      rep = convergence_study(c, n_list, m_list, out_dir);
    }
    py::list rows;
    for (const auto& row : rep.rows) {
      py::dict d;
      d["phase"] = row.phase;
      d["n_a"] = row.n_a;
      d["m_a"] = row.m_a;
      d["n_b"] = row.n_b;
      d["m_b"] = row.m_b;
      d["u_l2"] = row.u_l2;
      d["d_w12"] = row.d_w12;
      d["theta_l1"] = row.theta_l1;
      d["aborted"] = row.aborted;
      rows.append(d);
    }
    return rows;
  }, py::arg("config"), py::arg("n_list"), py::arg("m_list"), py::arg("out_dir") = std::string());

  m.def("audit", [](const std::string& snapshot, const RunConfig& c) {
    const AuditOutcome a = audit_snapshot(snapshot, c);
    return py::make_tuple(a.exit_code, a.json);
  }, py::arg("snapshot"), py::arg("config"));
}
