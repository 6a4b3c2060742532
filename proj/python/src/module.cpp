/*
   Copyright 2026 The francache Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fran/bench.hpp"
#include "fran/sca_cache.hpp"
#include "fran/sca_cache_dist.hpp"
#include "fran/sca_network.hpp"

namespace py = pybind11;
using namespace fran;

namespace {

py::list trace_objectives(const std::vector<TraceEntry>& trace) {
  py::list out;
  for (const auto& e : trace) out.append(py::make_tuple(e.iteration, e.errh, e.objective));
  return out;
}

py::dict cache_dict(const CacheLevelSolution& s) {
  py::dict d;
  d["objective"] = s.objective;
  d["iterations"] = s.iterations;
  d["status"] = to_string(s.status);
  d["rate"] = s.rate;
  d["trace"] = trace_objectives(s.trace);
  return d;
}

py::dict network_dict(const NetworkLevelSolution& s, const Instance& inst) {
  py::dict d;
  d["objective"] = s.objective;
  d["iterations"] = s.iterations;
  d["status"] = to_string(s.status);
  d["rate"] = s.rate;
  std::vector<double> loads;
  for (std::size_t i = 0; i < inst.num_errh(); ++i) loads.push_back(fronthaul_load(s, inst, i));
  d["fronthaul_loads"] = loads;
  d["trace"] = trace_objectives(s.trace);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-level cache-enabled F-RAN delivery simulator.";

  py::register_exception<InvalidParams>(m, "InvalidParams", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<InfeasiblePlacement>(m, "InfeasiblePlacement", PyExc_RuntimeError);

  py::class_<ScenarioParams>(m, "ScenarioParams")
      .def(py::init<>())
      .def_readwrite("num_errh", &ScenarioParams::num_errh)
      .def_readwrite("num_users", &ScenarioParams::num_users)
      .def_readwrite("antennas", &ScenarioParams::antennas)
      .def_readwrite("library_size", &ScenarioParams::library_size)
      .def_readwrite("file_size", &ScenarioParams::file_size)
      .def_readwrite("cache_size", &ScenarioParams::cache_size)
      .def_readwrite("fronthaul_capacity", &ScenarioParams::fronthaul_capacity)
      .def_readwrite("max_power", &ScenarioParams::max_power)
      .def_readwrite("noise_power", &ScenarioParams::noise_power)
      .def_readwrite("delay", &ScenarioParams::delay)
      .def_readwrite("reference_distance", &ScenarioParams::reference_distance)
      .def_readwrite("pathloss_exponent", &ScenarioParams::pathloss_exponent)
      .def_readwrite("cell_radius", &ScenarioParams::cell_radius)
      .def_readwrite("schedule_limit", &ScenarioParams::schedule_limit)
      .def_readwrite("stop_threshold", &ScenarioParams::stop_threshold)
      .def_readwrite("max_iterations", &ScenarioParams::max_iterations)
      .def_readwrite("seed", &ScenarioParams::seed)
      .def("validate", &ScenarioParams::validate)
      .def_property_readonly("power_db", &ScenarioParams::power_db);

  py::enum_<Algorithm>(m, "Algorithm")
      .value("CO_CEHTM", Algorithm::co_cehtm)
      .value("DO_CEHTM", Algorithm::do_cehtm)
      .value("TC_CJTM", Algorithm::tc_cjtm)
      .def_property_readonly("label", [](Algorithm a) { return to_string(a); });
  m.def("parse_algorithm", &parse_algorithm, py::arg("name"));

  py::class_<ResultRow>(m, "ResultRow")
      .def_readonly("scenario_id", &ResultRow::scenario_id)
      .def_readonly("seed", &ResultRow::seed)
      .def_readonly("algorithm", &ResultRow::algorithm)
      .def_readonly("C", &ResultRow::C)
      .def_readonly("S", &ResultRow::S)
      .def_readonly("P_dB", &ResultRow::P_dB)
      .def_readonly("B_over_S", &ResultRow::B_over_S)
      .def_readonly("tau", &ResultRow::tau)
      .def_readonly("iterations", &ResultRow::iterations)
      .def_readonly("tdr", &ResultRow::tdr)
      .def_readonly("tar", &ResultRow::tar)
      .def_readonly("runtime_ms", &ResultRow::runtime_ms)
      .def_readonly("summary", &ResultRow::summary)
      .def_readonly("tdr_se", &ResultRow::tdr_se)
      .def_readonly("message", &ResultRow::message)
      .def_property_readonly("status", [](const ResultRow& r) { return to_string(r.status); });

  m.def("run_pipeline", &run_pipeline, py::arg("params"), py::arg("algorithm"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "solve_cache",
      [](const ScenarioParams& p, std::uint64_t realization, bool decentralized) {
        Instance inst;
        CacheLevelSolution s;
        {
          py::gil_scoped_release nogil;
          inst = make_instance(p, realization);
          s = decentralized ? solve_cache_decentral(inst) : solve_cache_central(inst);
        }
        return cache_dict(s);
      },
      py::arg("params"), py::arg("realization") = 0, py::arg("decentralized") = false);

  m.def(
      "solve_network",
      [](const ScenarioParams& p, std::uint64_t realization, bool with_cache) {
        Instance inst;
        NetworkLevelSolution s;
        {
          py::gil_scoped_release nogil;
          inst = make_instance(p, realization);
          if (with_cache) {
            const CacheLevelSolution c = solve_cache_central(inst);
            s = solve_network(inst, &c);
          } else {
            s = solve_network(inst, nullptr);
          }
        }
        return network_dict(s, inst);
      },
      py::arg("params"), py::arg("realization") = 0, py::arg("with_cache") = true);

  m.def(
      "instance_json",
      [](const ScenarioParams& p, std::uint64_t realization) {
        std::ostringstream out;
        write_instance_json(out, make_instance(p, realization));
        return out.str();
      },
      py::arg("params"), py::arg("realization") = 0);

  m.def(
      "sweep",
      [](const std::string& axis, const std::vector<double>& values, std::size_t realizations,
         const std::vector<Algorithm>& algorithms, const ScenarioParams& base, std::size_t threads) {
        SweepSpec spec;
        spec.axis = parse_axis(axis);
        spec.values = values;
        spec.realizations = realizations;
        spec.algorithms = algorithms.empty() ? all_algorithms() : algorithms;
        spec.base = base;
        spec.threads = threads;
        spec.validate();
        py::gil_scoped_release nogil;
        return sweep_rows(spec);
      },
      py::arg("axis"), py::arg("values"), py::arg("realizations") = 1,
      py::arg("algorithms") = std::vector<Algorithm>{}, py::arg("base") = ScenarioParams{},
      py::arg("threads") = 0);

  m.def(
      "to_csv",
      [](const std::vector<ResultRow>& rows) {
        std::ostringstream out;
        write_csv(out, rows);
        return out.str();
      },
      py::arg("rows"));

  m.def(
      "verify",
      [](std::size_t samples, std::size_t tiny, std::uint64_t seed) {
        const VerifyReport r = run_verification(samples, tiny, seed);
        return py::make_tuple(r.passed, r.lines);
      },
      py::arg("samples") = 10000, py::arg("tiny") = 5, py::arg("seed") = 1);
}
