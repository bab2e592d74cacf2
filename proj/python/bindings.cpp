// Copyright 2026 The qrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Configs and records cross the boundary as JSON text so the
// Python side sees exactly the schema the CLI reads and writes.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrc/benchmarks.hpp"
#include "qrc/errors.hpp"
#include "qrc/harness.hpp"

namespace py = pybind11;
using namespace qrc;

namespace {

ExperimentConfig parse_config(const std::string& text) {
  return config_from_json(text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text));
}

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum reservoir computing simulator";

  auto base = py::register_exception<Error>(m, "QrcError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ValueError>(m, "InvalidValueError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<IntegratorError>(m, "IntegratorError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  m.def("preset_names", &preset_names);
  m.def(
      "resolve_config", [](const std::string& text) { return to_json(parse_config(text)).dump(); }, py::arg("config") = "",
      "Resolved configuration (JSON) for a partial JSON config.");
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("config") = "");

  m.def(
      "hamiltonian",
      [](const std::string& text, std::size_t ham_index) { return build_reservoir(parse_config(text), ham_index).hamiltonian; },
      py::arg("config") = "", py::arg("ham_index") = 0, "Reservoir Hamiltonian of a config (hopping part for DSP).");
  m.def(
      "run_protocol",
      [](const std::string& text, const std::vector<double>& inputs, std::size_t ham_index) {
        const ExperimentConfig c = parse_config(text);
        py::gil_scoped_release release;
        return run_protocol(c.protocol, build_reservoir(c, ham_index), as_span(inputs)).values;
      },
      py::arg("config"), py::arg("inputs"), py::arg("ham_index") = 0,
      "Noiseless readout trace (steps after washout x nodes).");
  m.def(
      "add_shot_noise",
      [](const RealMatrix& trace, double n_measurements, std::uint64_t seed, std::optional<double> wmp_strength) {
        ReadoutTrace t{trace};
        NoiseSpec spec{n_measurements, wmp_strength, seed};
        return add_shot_noise(t, spec).values;
      },
      py::arg("trace"), py::arg("n_measurements") = 1e10, py::arg("seed") = 0, py::arg("wmp_strength") = py::none());

  m.def(
      "train_readout",
      [](const RealMatrix& x, const std::vector<double>& target, bool fit_intercept, double ridge) {
        const TrainedReadout r = train_readout(x, as_span(target), ReadoutOptions{fit_intercept, 1e-12, ridge});
        return py::make_tuple(r.weights, r.intercept, r.training_nrmse);
      },
      py::arg("x"), py::arg("target"), py::arg("fit_intercept") = false, py::arg("ridge") = 0.0,
      "Least-squares readout; returns (weights, intercept, training_nrmse).");
  m.def(
      "nrmse", [](const std::vector<double>& p, const std::vector<double>& t) { return nrmse(as_span(p), as_span(t)); },
      py::arg("prediction"), py::arg("target"));

  m.def("legendre", &legendre, py::arg("n"), py::arg("x"));
  m.def(
      "compute_ipc",
      [](const RealMatrix& trace, const std::vector<double>& inputs, unsigned max_total_degree,
         std::map<unsigned, std::size_t> max_delay_per_degree, std::size_t n_shuffles, double quantile,
         std::uint64_t seed, bool record_targets) {
        IpcBudget budget;
        budget.max_total_degree = max_total_degree;
        if (!max_delay_per_degree.empty()) budget.max_delay_per_degree = std::move(max_delay_per_degree);
        IpcConfig cfg;
        cfg.cutoff = {n_shuffles, quantile, seed};
        cfg.record_targets = record_targets;
        IpcReport report;
        {
          py::gil_scoped_release release;
          report = compute_ipc(ReadoutTrace{trace}, as_span(inputs), budget, cfg);
        }
        return to_json(report).dump();
      },
      py::arg("trace"), py::arg("inputs"), py::arg("max_total_degree") = 6,
      py::arg("max_delay_per_degree") = std::map<unsigned, std::size_t>{}, py::arg("n_shuffles") = 100,
      py::arg("quantile") = 0.999, py::arg("seed") = 0, py::arg("record_targets") = false,
      "Information processing capacity report (JSON).");

  m.def(
      "lorenz",
      [](std::size_t n_samples, double dt) {
        LorenzSpec spec;
        spec.dt = dt;
        const LorenzSeries s = integrate_lorenz(spec, n_samples);
        return py::make_tuple(s.x, s.y, s.z);
      },
      py::arg("n_samples"), py::arg("dt") = 0.001);
  m.def(
      "mackey_glass",
      [](std::size_t n_samples, double dt) {
        MackeyGlassSpec spec;
        spec.dt = dt;
        return integrate_mackey_glass(spec, n_samples);
      },
      py::arg("n_samples"), py::arg("dt") = 0.1);

  m.def(
      "run_experiment",
      [](const std::string& text) {
        const ExperimentConfig c = parse_config(text);
        std::vector<ResultRecord> records;
        {
          py::gil_scoped_release release;
          records = run_experiment(c);
        }
        return records_to_json(records).dump();
      },
      py::arg("config") = "", "Run every Hamiltonian of a config; returns the records as JSON.");
  m.def(
      "run_sweep",
      [](const std::string& text) {
        const SweepSpec s = sweep_from_json(nlohmann::json::parse(text));
        std::vector<ResultRecord> records;
        {
          py::gil_scoped_release release;
          records = run_sweep(s);
        }
        return records_to_json(records).dump();
      },
      py::arg("config"), "Run a parameter sweep (config with a 'sweep' section); returns JSON records.");
  m.def(
      "records_to_csv",
      [](const std::string& records) { return records_to_csv(records_from_json(nlohmann::json::parse(records))); },
      py::arg("records"));
}
