#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hqvmc/driver.hpp"
#include "hqvmc/exact.hpp"
#include "hqvmc/hamiltonian_io.hpp"
#include "hqvmc/phase_net.hpp"
#include "hqvmc/transformer.hpp"

namespace py = pybind11;
using namespace hqvmc;

namespace {

py::dict record_dict(const IterationRecord& r) {
  py::dict d;
  d["iteration"] = r.iteration;
  d["energy"] = r.energy;
  d["energy_imag"] = r.energy_imag;
  d["variance"] = r.variance;
  d["std_error"] = r.std_error;
  d["rel_error"] = r.rel_error;
  d["max_weight"] = r.max_weight;
  d["grad_inf"] = r.grad_inf;
  d["lr"] = r.lr;
  d["active_params"] = r.active_params;
  d["unique_configs"] = r.unique_configs;
  return d;
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  py::list records;
  for (const auto& rec : r.records) records.append(record_dict(rec));
  d["records"] = records;
  d["final_energy"] = r.final_energy;
  d["final_std_error"] = r.final_std_error;
  d["exact_energy"] = r.exact_energy;
  d["variational_energy"] = r.variational_energy;
  d["rel_error"] = r.rel_error;
  d["params"] = r.params;
  d["n_qubits"] = r.n_qubits;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", PyExc_ValueError);

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def_static("afh_chain", &build_afh_chain, py::arg("n"), py::arg("coupling") = 1.0, py::arg("periodic") = true)
      .def_static("load", &load_hamiltonian_file, py::arg("path"))
      .def_static("resolve", &resolve_hamiltonian, py::arg("source"))
      .def_static(
          "from_text",
          [](const std::string& text) {
            std::istringstream in(text);
            return read_pauli_hamiltonian(in);
          },
          py::arg("text"))
      .def_property_readonly("n_qubits", &Hamiltonian::n_qubits)
      .def_property_readonly("terms",
                             [](const Hamiltonian& h) {
                               std::vector<std::pair<cplx, std::string>> out;
                               for (const auto& t : h.terms()) out.emplace_back(t.coeff, t.string.str());
                               return out;
                             })
      .def("to_text",
           [](const Hamiltonian& h) {
             std::ostringstream out;
             write_pauli_hamiltonian(out, h);
             return out.str();
           })
      .def("connected", [](const Hamiltonian& h, const std::string& s) {
        std::vector<std::pair<std::string, cplx>> out;
        for (const auto& e : h.connected(Configuration::parse(s))) out.emplace_back(e.state.str(), e.element);
        return out;
      });

  m.def("exact_ground_energy", &exact_ground_energy, py::arg("hamiltonian"));
  m.def(
      "param_count",
      [](int n, int d, int heads, int blocks) { return param_count({n, d, heads, blocks}); }, py::arg("n_qubits"),
      py::arg("embed_dim"), py::arg("heads"), py::arg("blocks"));
  m.def("phase_net_param_count", &PhaseNet::count, py::arg("n_inputs"), py::arg("hidden"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static(
          "parse", [](const std::string& text) { return RunConfig::parse(text); }, py::arg("text"))
      .def("set", &RunConfig::set, py::arg("key"), py::arg("value"))
      .def("validate", &RunConfig::validate)
      .def("to_text", &RunConfig::to_text)
      .def("__repr__", [](const RunConfig& c) { return "RunConfig(\n" + c.to_text() + ")"; });

  m.def("preset_names", &preset_names);
  m.def("preset", &preset, py::arg("name"));
  m.def(
      "run",
      [](const RunConfig& cfg) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(cfg);
        }
        return result_dict(r);
      },
      py::arg("config"));
}
