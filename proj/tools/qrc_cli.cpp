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

// qrc: command-line front end for experiments.
//
//   qrc show-config --preset wmp
//   qrc ipc --config frp.json --out frp.csv
//   qrc sweep --config mrp-sweep.json --jobs 4 --format json
//   qrc gen-data --system lorenz --samples 23001 --out lorenz.txt
//
// Results go to --out, else to $QRC_OUTPUT_DIR/<command>-<hash>.<ext>, else
// stdout. Failures print {"error": {...}} on stderr and exit nonzero.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrc/errors.hpp"
#include "qrc/harness.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out;
  std::string format = "csv";
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qrc::IoError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw qrc::ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

json resolved_json(const Common& c) {
  json j = c.config.empty() ? json::object() : load_json(c.config);
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (c.seed) j["seed"] = *c.seed;
  if (c.jobs) j["jobs"] = *c.jobs;
  return j;
}

std::optional<std::filesystem::path> output_path(const Common& c, const std::string& command, const std::string& hash,
                                                 const std::string& ext) {
  if (!c.out.empty()) return std::filesystem::path(c.out);
  if (const char* dir = std::getenv("QRC_OUTPUT_DIR"); dir && *dir) {
    return std::filesystem::path(dir) / (command + "-" + hash + "." + ext);
  }
  return std::nullopt;
}

void emit(const std::vector<qrc::ResultRecord>& records, const Common& c, const std::string& command,
          const std::string& hash) {
  const qrc::ExportFormat format = qrc::export_format_from_string(c.format);
  if (auto path = output_path(c, command, hash, c.format)) {
    qrc::export_records(records, format, *path);
    std::cout << json{{"written", path->string()}, {"records", records.size()}}.dump() << '\n';
  } else if (format == qrc::ExportFormat::kCsv) {
    std::cout << qrc::records_to_csv(records);
  } else {
    std::cout << qrc::records_to_json(records).dump(2) << '\n';
  }
  for (const auto& r : records) {
    if (!r.error.empty()) {
      throw qrc::ValueError("record (grid " + std::to_string(r.grid_index) + ", hamiltonian " +
                            std::to_string(r.ham_index) + ") failed: " + r.error);
    }
  }
}

void add_common(CLI::App* app, Common& c, bool with_output) {
  app->add_option("--config", c.config, "JSON experiment config");
  app->add_option("--preset", c.preset, "Preset: frp-default, mrp, wmp, chaos, dsp");
  app->add_option("--seed", c.seed, "Master seed");
  if (with_output) {
    app->add_option("--jobs", c.jobs, "Worker threads");
    app->add_option("--out", c.out, "Output file");
    app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum reservoir computing experiments"};
  app.require_subcommand(1);

  Common ipc_opts, task_opts, sweep_opts, show_opts, gen_opts;
  auto* ipc = app.add_subcommand("ipc", "Information processing capacity of each Hamiltonian sample");
  add_common(ipc, ipc_opts, true);
  auto* task = app.add_subcommand("task", "Benchmark-task NRMSE of each Hamiltonian sample");
  add_common(task, task_opts, true);
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep described by the config's 'sweep' section");
  add_common(sweep, sweep_opts, true);
  auto* show = app.add_subcommand("show-config", "Print the resolved config and its hash");
  add_common(show, show_opts, false);
  auto* gen = app.add_subcommand("gen-data", "Write a benchmark series to a text file");
  add_common(gen, gen_opts, false);
  std::string system = "lorenz";
  std::size_t samples = 0;
  gen->add_option("--system", system, "lorenz or mackey-glass")->check(CLI::IsMember({"lorenz", "mackey-glass"}));
  gen->add_option("--samples", samples, "Number of samples (default: washout + n_train + n_test + 1)");
  gen->add_option("--out", gen_opts.out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what());
  }

  try {
    if (*ipc || *task) {
      const Common& c = *ipc ? ipc_opts : task_opts;
      qrc::ExperimentConfig config = qrc::config_from_json(resolved_json(c));
      if (*ipc) {
        config.ipc_enabled = true;
        config.tasks.clear();
      } else {
        config.ipc_enabled = false;
        if (config.tasks.empty()) throw qrc::ConfigError("config selects no tasks");
      }
      emit(qrc::run_experiment(config), c, *ipc ? "ipc" : "task", qrc::config_hash(config));
    } else if (*sweep) {
      const qrc::SweepSpec spec = qrc::sweep_from_json(resolved_json(sweep_opts));
      emit(qrc::run_sweep(spec), sweep_opts, "sweep", qrc::config_hash(spec.base));
    } else if (*show) {
      const qrc::ExperimentConfig config = qrc::config_from_json(resolved_json(show_opts));
      std::cout << json{{"config", qrc::to_json(config)}, {"hash", qrc::config_hash(config)}}.dump(2) << '\n';
    } else if (*gen) {
      const qrc::ExperimentConfig config = qrc::config_from_json(resolved_json(gen_opts));
      if (samples == 0) samples = config.protocol.washout + config.n_train + config.n_test + 1;
      std::vector<std::vector<double>> columns;
      std::string hash;
      if (system == "lorenz") {
        qrc::LorenzSeries s = qrc::integrate_lorenz(config.lorenz, samples);
        columns = {std::move(s.x), std::move(s.y), std::move(s.z)};
        hash = qrc::spec_hash(config.lorenz, samples);
      } else {
        columns = {qrc::integrate_mackey_glass(config.mackey_glass, samples)};
        hash = qrc::spec_hash(config.mackey_glass, samples);
      }
      std::filesystem::path path = gen_opts.out;
      if (path.empty()) {
        const char* dir = std::getenv("QRC_OUTPUT_DIR");
        path = std::filesystem::path(dir && *dir ? dir : ".") / (system + "-" + hash + ".txt");
      }
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      qrc::write_series(path, columns);
      std::cout << json{{"written", path.string()}, {"samples", samples}, {"hash", hash}}.dump() << '\n';
    }
  } catch (const qrc::Error& e) {
    return fail(e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
  return 0;
}
