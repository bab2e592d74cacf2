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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qrc/errors.hpp"
#include "qrc/harness.hpp"

namespace qrc {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s.empty() || s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ValueError("bad numeric CSV field '" + s + "'");
  return v;
}

// JSON has no NaN; it is written as null and read back as NaN.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double from_num(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

ExportFormat export_format_from_string(const std::string& name) {
  if (name == "csv") return ExportFormat::kCsv;
  if (name == "json") return ExportFormat::kJson;
  throw ConfigError("unknown export format '" + name + "' (expected csv or json)");
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{
      "parameter", "seed",          "ham_index", "ipc_1",     "ipc_2",     "ipc_3",    "ipc_4",    "ipc_5",
      "ipc_6",     "ipc_linear",    "ipc_nonlinear", "ipc_total", "nrmse_lxx", "nrmse_lxz", "nrmse_mg", "runtime_s",
      "config_hash"};
  return columns;
}

std::string records_to_csv(const std::vector<ResultRecord>& records) {
  std::ostringstream out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    out << fmt17(r.parameter) << ',' << r.seed << ',' << r.ham_index;
    for (double c : r.ipc.per_degree) out << ',' << fmt17(c);
    out << ',' << fmt17(r.ipc.linear) << ',' << fmt17(r.ipc.nonlinear) << ',' << fmt17(r.ipc.total);
    for (TaskKind k : {TaskKind::kLxx, TaskKind::kLxz, TaskKind::kMg}) out << ',' << fmt17(r.task_nrmse(k));
    out << ',' << fmt17(r.runtime_s) << ',' << r.config_hash << '\n';
  }
  return out.str();
}

std::vector<ResultRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValueError("empty CSV");
  std::string header;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) header += (i ? "," : "") + cols[i];
  if (line != header) throw ValueError("unexpected CSV header");
  std::vector<ResultRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != cols.size()) throw ValueError("CSV line " + std::to_string(line_no) + ": wrong field count");
    ResultRecord r;
    r.parameter = parse_double(f[0]);
    r.seed = std::stoull(f[1]);
    r.ham_index = std::stoull(f[2]);
    for (std::size_t d = 0; d < kMaxIpcDegree; ++d) r.ipc.per_degree[d] = parse_double(f[3 + d]);
    r.ipc.linear = parse_double(f[9]);
    r.ipc.nonlinear = parse_double(f[10]);
    r.ipc.total = parse_double(f[11]);
    const TaskKind kinds[] = {TaskKind::kLxx, TaskKind::kLxz, TaskKind::kMg};
    for (std::size_t t = 0; t < 3; ++t) {
      const double v = parse_double(f[12 + t]);
      if (!std::isnan(v)) r.nrmse[kinds[t]] = v;
    }
    r.runtime_s = parse_double(f[15]);
    r.config_hash = f[16];
    out.push_back(std::move(r));
  }
  return out;
}

json to_json(const IpcReport& report) {
  json j;
  json per = json::array();
  for (double c : report.per_degree) per.push_back(num(c));
  j["per_degree"] = per;
  j["linear"] = num(report.linear);
  j["nonlinear"] = num(report.nonlinear);
  j["total"] = num(report.total);
  j["cutoff_value"] = num(report.cutoff_value);
  j["n_targets_evaluated"] = report.n_targets_evaluated;
  j["n_targets_surviving"] = report.n_targets_surviving;
  j["n_readout_nodes"] = report.n_readout_nodes;
  json fams = json::array();
  for (const auto& f : report.family_cutoffs) fams.push_back({{"degree", f.degree}, {"n_terms", f.n_terms}, {"cutoff", num(f.cutoff)}});
  j["family_cutoffs"] = fams;
  json targets = json::array();
  for (const auto& t : report.targets) {
    json terms = json::array();
    for (const auto& term : t.spec.terms) terms.push_back({term.degree, term.delay});
    targets.push_back({{"terms", terms}, {"capacity", num(t.capacity)}, {"survived", t.survived}});
  }
  j["targets"] = targets;
  return j;
}

IpcReport ipc_report_from_json(const json& j) {
  IpcReport r;
  try {
    const auto& per = j.at("per_degree");
    if (per.size() != kMaxIpcDegree) throw ValueError("per_degree must have 6 entries");
    for (std::size_t d = 0; d < kMaxIpcDegree; ++d) r.per_degree[d] = from_num(per[d]);
    r.linear = from_num(j.at("linear"));
    r.nonlinear = from_num(j.at("nonlinear"));
    r.total = from_num(j.at("total"));
    r.cutoff_value = from_num(j.at("cutoff_value"));
    r.n_targets_evaluated = j.at("n_targets_evaluated").get<std::size_t>();
    r.n_targets_surviving = j.at("n_targets_surviving").get<std::size_t>();
    r.n_readout_nodes = j.at("n_readout_nodes").get<std::size_t>();
    for (const auto& f : j.value("family_cutoffs", json::array())) {
      r.family_cutoffs.push_back({f.at("degree").get<unsigned>(), f.at("n_terms").get<std::size_t>(), from_num(f.at("cutoff"))});
    }
    for (const auto& t : j.value("targets", json::array())) {
      TargetCapacity tc;
      for (const auto& term : t.at("terms")) tc.spec.terms.push_back({term.at(0).get<unsigned>(), term.at(1).get<std::size_t>()});
      tc.capacity = from_num(t.at("capacity"));
      tc.survived = t.at("survived").get<bool>();
      r.targets.push_back(std::move(tc));
    }
  } catch (const json::exception& e) {
    throw ValueError(std::string("malformed IPC report JSON: ") + e.what());
  }
  return r;
}

json records_to_json(const std::vector<ResultRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json nrmse = json::object();
    for (const auto& [k, v] : r.nrmse) nrmse[to_string(k)] = num(v);
    arr.push_back({{"parameter_name", r.parameter_name},
                   {"parameter", num(r.parameter)},
                   {"grid_index", r.grid_index},
                   {"seed", r.seed},
                   {"ham_index", r.ham_index},
                   {"ipc", to_json(r.ipc)},
                   {"nrmse", nrmse},
                   {"runtime_s", num(r.runtime_s)},
                   {"config_hash", r.config_hash},
                   {"error", r.error}});
  }
  return arr;
}

std::vector<ResultRecord> records_from_json(const json& j) {
  if (!j.is_array()) throw ValueError("records JSON must be an array");
  std::vector<ResultRecord> out;
  try {
    for (const auto& e : j) {
      ResultRecord r;
      r.parameter_name = e.at("parameter_name").get<std::string>();
      r.parameter = from_num(e.at("parameter"));
      r.grid_index = e.at("grid_index").get<std::size_t>();
      r.seed = e.at("seed").get<std::uint64_t>();
      r.ham_index = e.at("ham_index").get<std::size_t>();
      r.ipc = ipc_report_from_json(e.at("ipc"));
      for (const auto& [k, v] : e.at("nrmse").items()) r.nrmse[task_kind_from_string(k)] = from_num(v);
      r.runtime_s = from_num(e.at("runtime_s"));
      r.config_hash = e.at("config_hash").get<std::string>();
      r.error = e.value("error", std::string());
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValueError(std::string("malformed records JSON: ") + e.what());
  }
  return out;
}

void export_records(const std::vector<ResultRecord>& records, ExportFormat format, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  if (format == ExportFormat::kCsv) {
    out << records_to_csv(records);
  } else {
    out << records_to_json(records).dump(2) << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace qrc
