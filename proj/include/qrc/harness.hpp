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

#pragma once

// Seeded experiment orchestration: one record per (grid point, Hamiltonian
// sample), sweeps over protocol/Hamiltonian parameters, ensemble
// aggregation and normalized curves.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrc/benchmarks.hpp"
#include "qrc/hamiltonians.hpp"
#include "qrc/ipc.hpp"
#include "qrc/protocols.hpp"
#include "qrc/readout.hpp"

namespace qrc {

enum class Scale { kDesk, kFull };

struct HamiltonianProfile {
  std::size_t n_qubits = 4;
  double field_strength = 1.0;
  double coupling_low = 0.0;
  double coupling_high = 1.0;
  bool normalize_spectral_radius = true;
};

struct NoiseConfig {
  double n_measurements = 1e10;
  /// WMP: scale the noise std by 1/sin(theta) (theta = 0 runs the FRP limit unscaled).
  bool wmp_scaling = true;
};

struct ExperimentConfig {
  std::string preset = "frp-default";
  ProtocolConfig protocol;
  HamiltonianProfile hamiltonian;
  NoiseConfig noise;
  bool ipc_enabled = true;
  std::size_t ipc_samples = 20000;
  IpcBudget ipc_budget;
  IpcConfig ipc;
  std::vector<TaskKind> tasks{TaskKind::kLxx, TaskKind::kLxz, TaskKind::kMg};
  std::size_t n_train = 20000;
  std::size_t n_test = 2000;
  std::uint64_t seed = 42;
  std::size_t n_hamiltonians = 5;
  /// Worker threads for sweeps; not part of the config hash.
  std::size_t jobs = 1;
  ReadoutOptions readout{true, 1e-12, 0.0};
  LorenzSpec lorenz;
  MackeyGlassSpec mackey_glass;

  void validate() const;
  std::size_t n_nodes() const { return hamiltonian.n_qubits * protocol.clock.multiplexing; }
};

/// Preset names: frp-default, mrp, wmp, chaos, dsp.
std::vector<std::string> preset_names();
ExperimentConfig make_preset(const std::string& name, Scale scale = Scale::kDesk);

/// Starts from j["preset"] (and j["scale"]) and overrides field by field.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);
/// 16 hex digits, stable across platforms for identical configs.
std::string config_hash(const ExperimentConfig& config);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ResultRecord {
  std::string parameter_name;
  double parameter = kNaN;
  std::size_t grid_index = 0;
  std::uint64_t seed = 0;
  std::size_t ham_index = 0;
  IpcReport ipc;
  std::map<TaskKind, double> nrmse;
  double runtime_s = 0.0;
  std::string config_hash;
  /// Non-empty when the record aborted; the other fields are then partial.
  std::string error;

  double task_nrmse(TaskKind kind) const;
};

/// Everything except runtime is equal.
bool same_results(const ResultRecord& a, const ResultRecord& b);

/// Benchmark series shared by all records of an experiment.
struct TaskData {
  LorenzSeries lorenz;
  std::vector<double> mackey_glass;
};

TaskData prepare_task_data(const ExperimentConfig& config);

/// Reservoir of one Hamiltonian sample: a static TFIM or a driven model.
struct Reservoir {
  ComplexMatrix hamiltonian;
  std::optional<DrivenTfimSpec> driven;
};

Reservoir build_reservoir(const ExperimentConfig& config, std::size_t ham_index);
ReadoutTrace run_protocol(const ProtocolConfig& protocol, const Reservoir& reservoir, std::span<const double> inputs,
                          const RunOptions& options = {});

/// Noise applied to traces of this config.
NoiseSpec noise_spec(const ExperimentConfig& config, std::uint64_t seed);

ResultRecord run_single(const ExperimentConfig& config, std::size_t grid_index, std::size_t ham_index,
                        const TaskData& data);
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config);

inline const std::vector<std::string> kSweepParameters{"reset_length", "measurement_strength", "field_strength",
                                                       "decay_rate"};

struct SweepSpec {
  std::string parameter;
  std::vector<double> grid;
  ExperimentConfig base;

  void validate() const;
};

SweepSpec sweep_from_json(const nlohmann::json& j);
ExperimentConfig with_parameter(ExperimentConfig config, const std::string& parameter, double value);
/// Records sorted by (grid index, Hamiltonian index) whatever the job count.
std::vector<ResultRecord> run_sweep(const SweepSpec& sweep);

struct MeanSe {
  double mean = kNaN;
  double se = kNaN;
};

struct Aggregate {
  double parameter = kNaN;
  std::size_t n = 0;
  std::array<MeanSe, kMaxIpcDegree> ipc{};
  MeanSe linear, nonlinear, total;
  std::map<TaskKind, MeanSe> nrmse;
};

MeanSe mean_se(const std::vector<double>& values);
/// One aggregate per distinct parameter value (grid order); failed records are skipped.
std::vector<Aggregate> aggregate(const std::vector<ResultRecord>& records);

struct Reference {
  enum class Kind { kGridValue, kMaxMemory, kExternal };
  Kind kind = Kind::kMaxMemory;
  double value = kNaN;
  std::vector<ResultRecord> external;

  static Reference grid_value(double v) { return {Kind::kGridValue, v, {}}; }
  static Reference max_memory() { return {Kind::kMaxMemory, kNaN, {}}; }
  static Reference separate(std::vector<ResultRecord> records) { return {Kind::kExternal, kNaN, std::move(records)}; }
};

struct NormalizedCurve {
  std::vector<double> parameter;
  std::vector<double> memory, nonlinearity, total;
  std::vector<double> memory_se, nonlinearity_se, total_se;
};

NormalizedCurve normalize_records(const std::vector<ResultRecord>& records, const Reference& reference);

enum class ExportFormat { kCsv, kJson };
ExportFormat export_format_from_string(const std::string& name);

/// Fixed CSV columns, in order.
const std::vector<std::string>& csv_columns();
std::string records_to_csv(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> records_from_csv(const std::string& text);
nlohmann::json records_to_json(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> records_from_json(const nlohmann::json& j);
void export_records(const std::vector<ResultRecord>& records, ExportFormat format, const std::filesystem::path& path);

nlohmann::json to_json(const IpcReport& report);
IpcReport ipc_report_from_json(const nlohmann::json& j);

}  // namespace qrc
