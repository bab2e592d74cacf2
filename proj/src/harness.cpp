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

#include "qrc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "qrc/errors.hpp"
#include "qrc/parallel.hpp"
#include "qrc/rng.hpp"

namespace qrc {

namespace {

// Labels of the derived RNG streams.
enum Stream : std::uint64_t {
  kStreamHamiltonian = 1,
  kStreamIpcInputs = 2,
  kStreamNoise = 3,
  kStreamShuffle = 4,
  kStreamRecord = 5,
};

using nlohmann::json;

void check_keys(const json& j, const char* section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string("config section '") + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(std::string("unknown key '") + key + "' in config section '" + section + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

double read_measurements(const json& v) {
  if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
  if (v.is_number()) return v.get<double>();
  throw ConfigError("noise.n_measurements must be a number or \"inf\"");
}

}  // namespace

void ExperimentConfig::validate() const {
  protocol.validate();
  if (hamiltonian.n_qubits < 1 || hamiltonian.n_qubits > 8) throw ConfigError("n_qubits must lie in [1, 8]");
  if (hamiltonian.coupling_low > hamiltonian.coupling_high) throw ConfigError("coupling_low exceeds coupling_high");
  if (protocol.kind != ProtocolKind::kDsp && protocol.kind != ProtocolKind::kMrp && hamiltonian.n_qubits < 1) {
    throw ConfigError("state-reset protocols need at least one qubit");
  }
  if (n_hamiltonians < 1) throw ConfigError("n_hamiltonians must be at least 1");
  if (!(noise.n_measurements >= 1.0)) throw ConfigError("noise.n_measurements must be >= 1");
  if (ipc_enabled) {
    ipc_budget.validate();
    ipc.validate();
    if (ipc_samples <= ipc_budget.max_delay() + 16) throw ConfigError("ipc.n_samples is too small for the delay budget");
  }
  if (!tasks.empty() && (n_train < 2 || n_test < 2)) throw ConfigError("n_train and n_test must be at least 2");
  std::set<TaskKind> unique(tasks.begin(), tasks.end());
  if (unique.size() != tasks.size()) throw ConfigError("duplicate task in task list");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

std::vector<std::string> preset_names() { return {"frp-default", "mrp", "wmp", "chaos", "dsp"}; }

ExperimentConfig make_preset(const std::string& name, Scale scale) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "frp-default") {
    c.protocol = ProtocolConfig::frp();
  } else if (name == "mrp") {
    c.protocol = ProtocolConfig::mrp(6);
  } else if (name == "wmp") {
    c.protocol = ProtocolConfig::wmp(0.109);
    // Every sub-readout is a weak measurement, so each one carries back-action.
    c.protocol.backaction_per_subreadout = true;
  } else if (name == "chaos") {
    c.protocol = ProtocolConfig::frp();
    c.hamiltonian.coupling_low = -1.0;
    c.hamiltonian.coupling_high = 1.0;
    c.hamiltonian.normalize_spectral_radius = false;
    c.n_hamiltonians = 10;
  } else if (name == "dsp") {
    c.protocol = ProtocolConfig::dsp(0.5);
    c.hamiltonian.normalize_spectral_radius = false;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  if (scale == Scale::kFull) {
    c.n_train = 50000;
    c.n_test = 5000;
    c.ipc_samples = 50000;
    c.n_hamiltonians = 100;
  }
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "root",
             {"preset", "scale", "protocol", "hamiltonian", "noise", "ipc", "tasks", "n_train", "n_test", "seed",
              "n_hamiltonians", "jobs", "readout", "lorenz", "mackey_glass", "sweep"});
  std::string preset = j.value("preset", std::string("frp-default"));
  const std::string scale = j.value("scale", std::string("desk"));
  if (scale != "desk" && scale != "full") throw ConfigError("scale must be 'desk' or 'full'");
  ExperimentConfig c = make_preset(preset, scale == "full" ? Scale::kFull : Scale::kDesk);

  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    check_keys(p, "protocol",
               {"kind", "reset_length", "measurement_strength", "decay_rate", "clock_cycle", "multiplexing", "washout",
                "backaction_per_subreadout", "dsp_steps_per_cycle"});
    if (p.contains("kind")) c.protocol.kind = protocol_kind_from_string(p.at("kind").get<std::string>());
    read(p, "reset_length", c.protocol.reset_length);
    read(p, "measurement_strength", c.protocol.measurement_strength);
    read(p, "decay_rate", c.protocol.decay_rate);
    read(p, "clock_cycle", c.protocol.clock.clock_cycle);
    read(p, "multiplexing", c.protocol.clock.multiplexing);
    read(p, "washout", c.protocol.washout);
    read(p, "backaction_per_subreadout", c.protocol.backaction_per_subreadout);
    read(p, "dsp_steps_per_cycle", c.protocol.dsp_steps_per_cycle);
  }
  if (j.contains("hamiltonian")) {
    const json& h = j.at("hamiltonian");
    check_keys(h, "hamiltonian", {"n_qubits", "field_strength", "coupling_low", "coupling_high", "normalize_spectral_radius"});
    read(h, "n_qubits", c.hamiltonian.n_qubits);
    read(h, "field_strength", c.hamiltonian.field_strength);
    read(h, "coupling_low", c.hamiltonian.coupling_low);
    read(h, "coupling_high", c.hamiltonian.coupling_high);
    read(h, "normalize_spectral_radius", c.hamiltonian.normalize_spectral_radius);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    check_keys(n, "noise", {"n_measurements", "wmp_scaling"});
    if (n.contains("n_measurements")) c.noise.n_measurements = read_measurements(n.at("n_measurements"));
    read(n, "wmp_scaling", c.noise.wmp_scaling);
  }
  if (j.contains("ipc")) {
    const json& i = j.at("ipc");
    check_keys(i, "ipc",
               {"enabled", "n_samples", "max_total_degree", "max_delay_per_degree", "early_stop_window", "n_shuffles",
                "quantile", "held_out_fraction", "fit_intercept", "rcond", "record_targets"});
    read(i, "enabled", c.ipc_enabled);
    read(i, "n_samples", c.ipc_samples);
    read(i, "max_total_degree", c.ipc_budget.max_total_degree);
    if (i.contains("max_delay_per_degree")) {
      const json& m = i.at("max_delay_per_degree");
      if (!m.is_object()) throw ConfigError("ipc.max_delay_per_degree must be an object keyed by degree");
      c.ipc_budget.max_delay_per_degree.clear();
      for (const auto& [key, value] : m.items()) {
        const int d = std::stoi(key);
        if (d < 1 || d > static_cast<int>(kMaxIpcDegree)) throw ConfigError("delay cap for invalid degree " + key);
        c.ipc_budget.max_delay_per_degree[static_cast<unsigned>(d)] = value.get<std::size_t>();
      }
    }
    read(i, "early_stop_window", c.ipc_budget.early_stop_window);
    read(i, "n_shuffles", c.ipc.cutoff.n_shuffles);
    read(i, "quantile", c.ipc.cutoff.quantile);
    read(i, "held_out_fraction", c.ipc.held_out_fraction);
    read(i, "fit_intercept", c.ipc.fit_intercept);
    read(i, "rcond", c.ipc.rcond);
    read(i, "record_targets", c.ipc.record_targets);
  }
  if (j.contains("tasks")) {
    c.tasks.clear();
    for (const auto& t : j.at("tasks")) c.tasks.push_back(task_kind_from_string(t.get<std::string>()));
  }
  read(j, "n_train", c.n_train);
  read(j, "n_test", c.n_test);
  read(j, "seed", c.seed);
  read(j, "n_hamiltonians", c.n_hamiltonians);
  read(j, "jobs", c.jobs);
  if (j.contains("readout")) {
    const json& r = j.at("readout");
    check_keys(r, "readout", {"fit_intercept", "rcond", "ridge"});
    read(r, "fit_intercept", c.readout.fit_intercept);
    read(r, "rcond", c.readout.rcond);
    read(r, "ridge", c.readout.ridge);
  }
  if (j.contains("lorenz")) {
    const json& l = j.at("lorenz");
    check_keys(l, "lorenz", {"dt", "sample_interval", "transient", "initial", "initial_jitter"});
    read(l, "dt", c.lorenz.dt);
    read(l, "sample_interval", c.lorenz.sample_interval);
    read(l, "transient", c.lorenz.transient);
    read(l, "initial", c.lorenz.initial);
    read(l, "initial_jitter", c.lorenz.initial_jitter);
  }
  if (j.contains("mackey_glass")) {
    const json& m = j.at("mackey_glass");
    check_keys(m, "mackey_glass", {"dt", "sample_interval", "transient", "history", "delay"});
    read(m, "dt", c.mackey_glass.dt);
    read(m, "sample_interval", c.mackey_glass.sample_interval);
    read(m, "transient", c.mackey_glass.transient);
    read(m, "history", c.mackey_glass.history);
    read(m, "delay", c.mackey_glass.delay);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["protocol"] = {{"kind", to_string(c.protocol.kind)},
                   {"reset_length", c.protocol.reset_length},
                   {"measurement_strength", c.protocol.measurement_strength},
                   {"decay_rate", c.protocol.decay_rate},
                   {"clock_cycle", c.protocol.clock.clock_cycle},
                   {"multiplexing", c.protocol.clock.multiplexing},
                   {"washout", c.protocol.washout},
                   {"backaction_per_subreadout", c.protocol.backaction_per_subreadout},
                   {"dsp_steps_per_cycle", c.protocol.dsp_steps_per_cycle}};
  j["hamiltonian"] = {{"n_qubits", c.hamiltonian.n_qubits},
                      {"field_strength", c.hamiltonian.field_strength},
                      {"coupling_low", c.hamiltonian.coupling_low},
                      {"coupling_high", c.hamiltonian.coupling_high},
                      {"normalize_spectral_radius", c.hamiltonian.normalize_spectral_radius}};
  j["noise"] = {{"n_measurements", std::isinf(c.noise.n_measurements) ? json("inf") : json(c.noise.n_measurements)},
                {"wmp_scaling", c.noise.wmp_scaling}};
  json caps = json::object();
  for (const auto& [d, cap] : c.ipc_budget.max_delay_per_degree) caps[std::to_string(d)] = cap;
  j["ipc"] = {{"enabled", c.ipc_enabled},
              {"n_samples", c.ipc_samples},
              {"max_total_degree", c.ipc_budget.max_total_degree},
              {"max_delay_per_degree", caps},
              {"early_stop_window", c.ipc_budget.early_stop_window},
              {"n_shuffles", c.ipc.cutoff.n_shuffles},
              {"quantile", c.ipc.cutoff.quantile},
              {"held_out_fraction", c.ipc.held_out_fraction},
              {"fit_intercept", c.ipc.fit_intercept},
              {"rcond", c.ipc.rcond},
              {"record_targets", c.ipc.record_targets}};
  json tasks = json::array();
  for (TaskKind t : c.tasks) tasks.push_back(to_string(t));
  j["tasks"] = tasks;
  j["n_train"] = c.n_train;
  j["n_test"] = c.n_test;
  j["seed"] = c.seed;
  j["n_hamiltonians"] = c.n_hamiltonians;
  j["jobs"] = c.jobs;
  j["readout"] = {{"fit_intercept", c.readout.fit_intercept}, {"rcond", c.readout.rcond}, {"ridge", c.readout.ridge}};
  j["lorenz"] = {{"dt", c.lorenz.dt},
                 {"sample_interval", c.lorenz.sample_interval},
                 {"transient", c.lorenz.transient},
                 {"initial", c.lorenz.initial},
                 {"initial_jitter", c.lorenz.initial_jitter}};
  j["mackey_glass"] = {{"dt", c.mackey_glass.dt},
                       {"sample_interval", c.mackey_glass.sample_interval},
                       {"transient", c.mackey_glass.transient},
                       {"history", c.mackey_glass.history},
                       {"delay", c.mackey_glass.delay}};
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("jobs");
  j.erase("preset");
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

double ResultRecord::task_nrmse(TaskKind kind) const {
  const auto it = nrmse.find(kind);
  return it == nrmse.end() ? kNaN : it->second;
}

namespace {

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_report(const IpcReport& a, const IpcReport& b) {
  for (std::size_t d = 0; d < kMaxIpcDegree; ++d) {
    if (!same_double(a.per_degree[d], b.per_degree[d])) return false;
  }
  if (!same_double(a.linear, b.linear) || !same_double(a.nonlinear, b.nonlinear) || !same_double(a.total, b.total) ||
      !same_double(a.cutoff_value, b.cutoff_value) || a.n_targets_evaluated != b.n_targets_evaluated ||
      a.n_targets_surviving != b.n_targets_surviving || a.family_cutoffs.size() != b.family_cutoffs.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.family_cutoffs.size(); ++i) {
    if (!same_double(a.family_cutoffs[i].cutoff, b.family_cutoffs[i].cutoff)) return false;
  }
  return true;
}

}  // namespace

bool same_results(const ResultRecord& a, const ResultRecord& b) {
  if (a.parameter_name != b.parameter_name || !same_double(a.parameter, b.parameter) || a.grid_index != b.grid_index ||
      a.seed != b.seed || a.ham_index != b.ham_index || a.config_hash != b.config_hash || a.error != b.error ||
      a.nrmse.size() != b.nrmse.size() || !same_report(a.ipc, b.ipc)) {
    return false;
  }
  for (const auto& [k, v] : a.nrmse) {
    if (!same_double(v, b.task_nrmse(k))) return false;
  }
  return true;
}

TaskData prepare_task_data(const ExperimentConfig& config) {
  TaskData data;
  const std::size_t n = config.protocol.washout + config.n_train + config.n_test + 1;
  const bool lorenz = std::any_of(config.tasks.begin(), config.tasks.end(), [](TaskKind t) { return t != TaskKind::kMg; });
  const bool mg = std::find(config.tasks.begin(), config.tasks.end(), TaskKind::kMg) != config.tasks.end();
  if (lorenz) data.lorenz = integrate_lorenz(config.lorenz, n);
  if (mg) data.mackey_glass = integrate_mackey_glass(config.mackey_glass, n);
  return data;
}

Reservoir build_reservoir(const ExperimentConfig& config, std::size_t ham_index) {
  TfimSpec spec;
  spec.n_qubits = config.hamiltonian.n_qubits;
  spec.field_strength = config.hamiltonian.field_strength;
  spec.coupling_low = config.hamiltonian.coupling_low;
  spec.coupling_high = config.hamiltonian.coupling_high;
  spec.normalize_spectral_radius = config.hamiltonian.normalize_spectral_radius;
  // Couplings depend on (master seed, Hamiltonian index) only, so every grid
  // point of a sweep sees the same ensemble.
  spec.seed = derive_seed(config.seed, {kStreamHamiltonian, ham_index});
  const Couplings j = sample_couplings(spec);
  Reservoir r;
  if (config.protocol.kind == ProtocolKind::kDsp) {
    r.driven = DrivenTfimSpec{spec.n_qubits, j, 0};
    r.hamiltonian = make_driven_tfim(*r.driven).hopping;
  } else {
    r.hamiltonian = build_tfim(spec, j);
  }
  return r;
}

ReadoutTrace run_protocol(const ProtocolConfig& protocol, const Reservoir& reservoir, std::span<const double> inputs,
                          const RunOptions& options) {
  switch (protocol.kind) {
    case ProtocolKind::kFrp: return run_frp(reservoir.hamiltonian, protocol, inputs, options);
    case ProtocolKind::kMrp: return run_mrp(reservoir.hamiltonian, protocol, inputs, options);
    case ProtocolKind::kWmp: return run_wmp(reservoir.hamiltonian, protocol, inputs, options);
    case ProtocolKind::kDsp:
      if (!reservoir.driven) throw ConfigError("DSP needs a driven reservoir");
      return run_dsp(*reservoir.driven, protocol, inputs, options);
  }
  throw ConfigError("unknown protocol");
}

NoiseSpec noise_spec(const ExperimentConfig& config, std::uint64_t seed) {
  NoiseSpec spec;
  spec.n_measurements = config.noise.n_measurements;
  spec.seed = seed;
  if (config.protocol.kind == ProtocolKind::kWmp && config.noise.wmp_scaling && config.protocol.measurement_strength > 0.0) {
    spec.wmp_strength = config.protocol.measurement_strength;
  }
  return spec;
}

ResultRecord run_single(const ExperimentConfig& config, std::size_t grid_index, std::size_t ham_index,
                        const TaskData& data) {
  const auto start = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.grid_index = grid_index;
  rec.ham_index = ham_index;
  rec.seed = derive_seed(config.seed, {kStreamRecord, grid_index, ham_index});
  rec.config_hash = config_hash(config);
  try {
    config.validate();
    const Reservoir reservoir = build_reservoir(config, ham_index);
    const std::size_t washout = config.protocol.washout;
    if (config.ipc_enabled) {
      Rng rng(derive_seed(config.seed, {kStreamIpcInputs, ham_index}));
      std::vector<double> inputs(washout + config.ipc_samples);
      for (double& u : inputs) u = rng.uniform(-1.0, 1.0);
      const ReadoutTrace trace = run_protocol(config.protocol, reservoir, inputs);
      const ReadoutTrace noisy =
          add_shot_noise(trace, noise_spec(config, derive_seed(config.seed, {kStreamNoise, grid_index, ham_index, 0})));
      IpcConfig ipc = config.ipc;
      ipc.cutoff.seed = derive_seed(config.seed, {kStreamShuffle, grid_index, ham_index});
      rec.ipc = compute_ipc(noisy, std::span<const double>(inputs).subspan(washout), config.ipc_budget, ipc);
    }
    for (std::size_t t = 0; t < config.tasks.size(); ++t) {
      const TaskKind kind = config.tasks[t];
      const std::size_t needed = washout + config.n_train + config.n_test + 1;
      const std::vector<double>& series = kind == TaskKind::kMg ? data.mackey_glass : data.lorenz.x;
      if (series.size() < needed) throw ValueError("benchmark series shorter than washout + n_train + n_test + 1");
      const auto head = std::span<const double>(series).first(needed);
      const TaskDataset task =
          kind == TaskKind::kLxz ? make_task(head, kind, washout + config.n_train, std::span<const double>(data.lorenz.z).first(needed))
                                 : make_task(head, kind, washout + config.n_train);
      const auto inputs = std::span<const double>(task.inputs).first(needed - 1);
      const ReadoutTrace trace = run_protocol(config.protocol, reservoir, inputs);
      const ReadoutTrace noisy = add_shot_noise(
          trace, noise_spec(config, derive_seed(config.seed, {kStreamNoise, grid_index, ham_index, 1 + static_cast<std::uint64_t>(kind)})));
      const auto n_train = static_cast<Eigen::Index>(config.n_train);
      const auto n_test = static_cast<Eigen::Index>(config.n_test);
      const RealMatrix train = noisy.values.topRows(n_train);
      const RealMatrix test = noisy.values.middleRows(n_train, n_test);
      const auto targets = std::span<const double>(task.targets).subspan(washout);
      const TrainedReadout readout = train_readout(train, targets.first(config.n_train), config.readout);
      const RealVector prediction = predict(test, readout);
      rec.nrmse[kind] = nrmse(std::span<const double>(prediction.data(), static_cast<std::size_t>(prediction.size())),
                              targets.subspan(config.n_train, config.n_test));
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const TaskData data = prepare_task_data(config);
  std::vector<ResultRecord> out(config.n_hamiltonians);
  parallel_for(config.n_hamiltonians, config.jobs, [&](std::size_t h) { out[h] = run_single(config, 0, h, data); });
  return out;
}

void SweepSpec::validate() const {
  if (std::find(kSweepParameters.begin(), kSweepParameters.end(), parameter) == kSweepParameters.end()) {
    throw ConfigError("unknown sweep parameter '" + parameter + "'");
  }
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigError("sweep grid must be sorted");
  const ProtocolKind kind = base.protocol.kind;
  const bool ok = (parameter == "reset_length" && kind == ProtocolKind::kMrp) ||
                  (parameter == "measurement_strength" && kind == ProtocolKind::kWmp) ||
                  (parameter == "field_strength" && kind == ProtocolKind::kFrp) ||
                  (parameter == "decay_rate" && kind == ProtocolKind::kDsp);
  if (!ok) throw ConfigError("sweep parameter '" + parameter + "' does not apply to " + to_string(kind));
  base.validate();
}

namespace {

std::vector<double> grid_from_json(const json& g) {
  if (g.is_array()) return g.get<std::vector<double>>();
  if (!g.is_object()) throw ConfigError("sweep.grid must be an array or a {spacing, start, stop, count} object");
  check_keys(g, "sweep.grid", {"spacing", "start", "stop", "count"});
  const std::string spacing = g.value("spacing", std::string("linear"));
  const double start = g.at("start").get<double>();
  const double stop = g.at("stop").get<double>();
  const auto count = g.at("count").get<std::size_t>();
  if (count < 1) throw ConfigError("sweep.grid.count must be >= 1");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    if (spacing == "linear") {
      out[i] = start + f * (stop - start);
    } else if (spacing == "log") {
      if (!(start > 0.0 && stop > 0.0)) throw ConfigError("log grid bounds must be positive");
      out[i] = std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
    } else {
      throw ConfigError("sweep.grid.spacing must be 'linear' or 'log'");
    }
  }
  return out;
}

}  // namespace

SweepSpec sweep_from_json(const json& j) {
  if (!j.contains("sweep")) throw ConfigError("config has no 'sweep' section");
  const json& s = j.at("sweep");
  check_keys(s, "sweep", {"parameter", "grid"});
  SweepSpec sweep;
  sweep.parameter = s.at("parameter").get<std::string>();
  sweep.grid = grid_from_json(s.at("grid"));
  sweep.base = config_from_json(j);
  sweep.validate();
  return sweep;
}

ExperimentConfig with_parameter(ExperimentConfig config, const std::string& parameter, double value) {
  if (parameter == "reset_length") {
    if (!(value >= 1.0) || value != std::floor(value)) throw ConfigError("reset_length must be a positive integer");
    config.protocol.reset_length = static_cast<std::size_t>(value);
  } else if (parameter == "measurement_strength") {
    config.protocol.measurement_strength = value;
  } else if (parameter == "field_strength") {
    config.hamiltonian.field_strength = value;
  } else if (parameter == "decay_rate") {
    config.protocol.decay_rate = value;
  } else {
    throw ConfigError("unknown sweep parameter '" + parameter + "'");
  }
  return config;
}

std::vector<ResultRecord> run_sweep(const SweepSpec& sweep) {
  sweep.validate();
  const TaskData data = prepare_task_data(sweep.base);
  std::vector<ExperimentConfig> configs;
  for (double v : sweep.grid) configs.push_back(with_parameter(sweep.base, sweep.parameter, v));
  const std::size_t n_ham = sweep.base.n_hamiltonians;
  std::vector<ResultRecord> out(sweep.grid.size() * n_ham);
  parallel_for(out.size(), sweep.base.jobs, [&](std::size_t job) {
    const std::size_t g = job / n_ham;
    const std::size_t h = job % n_ham;
    ResultRecord r = run_single(configs[g], g, h, data);
    r.parameter_name = sweep.parameter;
    r.parameter = sweep.grid[g];
    out[job] = std::move(r);
  });
  return out;
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  if (values.size() == 1) {
    out.se = 0.0;
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

std::vector<Aggregate> aggregate(const std::vector<ResultRecord>& records) {
  std::vector<double> params;
  for (const auto& r : records) {
    if (!r.error.empty()) continue;
    const bool seen = std::any_of(params.begin(), params.end(), [&](double p) { return same_double(p, r.parameter); });
    if (!seen) params.push_back(r.parameter);
  }
  std::vector<Aggregate> out;
  for (double p : params) {
    Aggregate a;
    a.parameter = p;
    std::array<std::vector<double>, kMaxIpcDegree> per;
    std::vector<double> lin, non, tot;
    std::map<TaskKind, std::vector<double>> task;
    for (const auto& r : records) {
      if (!r.error.empty() || !same_double(r.parameter, p)) continue;
      ++a.n;
      for (std::size_t d = 0; d < kMaxIpcDegree; ++d) per[d].push_back(r.ipc.per_degree[d]);
      lin.push_back(r.ipc.linear);
      non.push_back(r.ipc.nonlinear);
      tot.push_back(r.ipc.total);
      for (const auto& [k, v] : r.nrmse) task[k].push_back(v);
    }
    for (std::size_t d = 0; d < kMaxIpcDegree; ++d) a.ipc[d] = mean_se(per[d]);
    a.linear = mean_se(lin);
    a.nonlinear = mean_se(non);
    a.total = mean_se(tot);
    for (const auto& [k, v] : task) a.nrmse[k] = mean_se(v);
    out.push_back(std::move(a));
  }
  return out;
}

NormalizedCurve normalize_records(const std::vector<ResultRecord>& records, const Reference& reference) {
  const std::vector<Aggregate> points = aggregate(records);
  if (points.empty()) throw ValueError("no successful records to normalize");
  Aggregate ref;
  switch (reference.kind) {
    case Reference::Kind::kGridValue: {
      const auto it = std::find_if(points.begin(), points.end(), [&](const Aggregate& a) {
        return std::abs(a.parameter - reference.value) <= 1e-12 * std::max(1.0, std::abs(reference.value));
      });
      if (it == points.end()) throw ValueError("reference grid value not present in the records");
      ref = *it;
      break;
    }
    case Reference::Kind::kMaxMemory:
      ref = *std::max_element(points.begin(), points.end(),
                              [](const Aggregate& a, const Aggregate& b) { return a.linear.mean < b.linear.mean; });
      break;
    case Reference::Kind::kExternal: {
      std::vector<ResultRecord> pooled = reference.external;
      for (auto& r : pooled) r.parameter = kNaN;
      const auto agg = aggregate(pooled);
      if (agg.empty()) throw ValueError("external reference has no successful records");
      ref = agg.front();
      break;
    }
  }
  if (ref.linear.mean == 0.0 || ref.nonlinear.mean == 0.0 || ref.total.mean == 0.0) {
    throw ValueError("reference aggregate is zero; cannot normalize");
  }
  NormalizedCurve c;
  for (const auto& a : points) {
    c.parameter.push_back(a.parameter);
    c.memory.push_back(a.linear.mean / ref.linear.mean);
    c.nonlinearity.push_back(a.nonlinear.mean / ref.nonlinear.mean);
    c.total.push_back(a.total.mean / ref.total.mean);
    c.memory_se.push_back(a.linear.se / std::abs(ref.linear.mean));
    c.nonlinearity_se.push_back(a.nonlinear.se / std::abs(ref.nonlinear.mean));
    c.total_se.push_back(a.total.se / std::abs(ref.total.mean));
  }
  return c;
}

}  // namespace qrc
