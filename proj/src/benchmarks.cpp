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

#include "qrc/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qrc/errors.hpp"
#include "qrc/rng.hpp"

namespace qrc {

namespace {

std::size_t integral_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double n = std::round(r);
  if (!(n >= 1.0) || std::abs(r - n) > 1e-9 * std::max(1.0, n)) {
    throw ConfigError(std::string(what) + " must be a positive integer multiple of dt");
  }
  return static_cast<std::size_t>(n);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void LorenzSpec::validate() const {
  if (!(dt > 0.0)) throw ConfigError("Lorenz dt must be positive");
  if (!(transient >= 0.0)) throw ConfigError("Lorenz transient must be >= 0");
  steps_per_sample();
}

std::size_t LorenzSpec::steps_per_sample() const { return integral_ratio(sample_interval, dt, "Lorenz sample interval"); }

std::array<double, 3> lorenz_derivative(const LorenzSpec& spec, const std::array<double, 3>& s) {
  return {spec.sigma * (s[1] - s[0]), s[0] * (spec.rho - s[2]) - s[1], s[0] * s[1] - spec.beta * s[2]};
}

std::array<double, 3> lorenz_advance(const LorenzSpec& spec, std::array<double, 3> s, double dt, std::size_t n_steps) {
  auto axpy = [](const std::array<double, 3>& a, double h, const std::array<double, 3>& k) {
    return std::array<double, 3>{a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2]};
  };
  for (std::size_t i = 0; i < n_steps; ++i) {
    const auto k1 = lorenz_derivative(spec, s);
    const auto k2 = lorenz_derivative(spec, axpy(s, 0.5 * dt, k1));
    const auto k3 = lorenz_derivative(spec, axpy(s, 0.5 * dt, k2));
    const auto k4 = lorenz_derivative(spec, axpy(s, dt, k3));
    for (int c = 0; c < 3; ++c) s[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
  }
  return s;
}

LorenzSeries integrate_lorenz(const LorenzSpec& spec, std::size_t n_samples) {
  spec.validate();
  std::array<double, 3> s = spec.initial;
  if (spec.initial_jitter != 0.0) {
    Rng rng(spec.seed);
    for (auto& c : s) c += spec.initial_jitter * rng.uniform(-1.0, 1.0);
  }
  s = lorenz_advance(spec, s, spec.dt, static_cast<std::size_t>(std::llround(spec.transient / spec.dt)));
  const std::size_t stride = spec.steps_per_sample();
  LorenzSeries out;
  out.x.reserve(n_samples);
  out.y.reserve(n_samples);
  out.z.reserve(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    if (n > 0) s = lorenz_advance(spec, s, spec.dt, stride);
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2])) {
      throw IntegratorError("Lorenz state became non-finite at sample " + std::to_string(n));
    }
    out.x.push_back(s[0]);
    out.y.push_back(s[1]);
    out.z.push_back(s[2]);
  }
  return out;
}

void MackeyGlassSpec::validate() const {
  if (!(dt > 0.0)) throw ConfigError("Mackey-Glass dt must be positive");
  if (!(transient >= 0.0)) throw ConfigError("Mackey-Glass transient must be >= 0");
  delay_steps();
  steps_per_sample();
}

std::size_t MackeyGlassSpec::delay_steps() const { return integral_ratio(delay, dt, "Mackey-Glass delay"); }

std::size_t MackeyGlassSpec::steps_per_sample() const {
  return integral_ratio(sample_interval, dt, "Mackey-Glass sample interval");
}

MackeyGlassIntegrator::MackeyGlassIntegrator(const MackeyGlassSpec& spec)
    : MackeyGlassIntegrator(spec, std::vector<double>(spec.delay_steps() + 1, spec.history)) {}

MackeyGlassIntegrator::MackeyGlassIntegrator(const MackeyGlassSpec& spec, std::vector<double> history)
    : spec_(spec), lag_(spec.delay_steps()), ring_(std::move(history)) {
  spec_.validate();
  if (ring_.size() != lag_ + 1) throw ValueError("Mackey-Glass history must hold delay/dt + 1 values");
}

double MackeyGlassIntegrator::value() const noexcept { return ring_[(head_ + lag_) % ring_.size()]; }

double MackeyGlassIntegrator::rate(double x, double delayed) const {
  return spec_.beta * delayed / (1.0 + std::pow(delayed, spec_.exponent)) - spec_.gamma * x;
}

void MackeyGlassIntegrator::step() {
  const std::size_t size = ring_.size();
  const double x = value();
  const double d0 = ring_[head_];                         // x(t - tau)
  const double d1 = ring_[(head_ + 1) % size];            // x(t - tau + dt)
  const double dm = 0.5 * (d0 + d1);                      // x(t - tau + dt/2), linear
  const double h = spec_.dt;
  const double k1 = rate(x, d0);
  const double k2 = rate(x + 0.5 * h * k1, dm);
  const double k3 = rate(x + 0.5 * h * k2, dm);
  const double k4 = rate(x + h * k3, d1);
  ring_[head_] = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  head_ = (head_ + 1) % size;
}

void MackeyGlassIntegrator::advance(std::size_t n_steps) {
  for (std::size_t i = 0; i < n_steps; ++i) step();
}

std::vector<double> MackeyGlassIntegrator::history() const {
  std::vector<double> out(ring_.size());
  for (std::size_t i = 0; i < ring_.size(); ++i) out[i] = ring_[(head_ + i) % ring_.size()];
  return out;
}

std::vector<double> integrate_mackey_glass(const MackeyGlassSpec& spec, std::size_t n_samples) {
  MackeyGlassIntegrator mg(spec);
  mg.advance(static_cast<std::size_t>(std::llround(spec.transient / spec.dt)));
  const std::size_t stride = spec.steps_per_sample();
  std::vector<double> out;
  out.reserve(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    if (n > 0) mg.advance(stride);
    if (!std::isfinite(mg.value())) throw IntegratorError("Mackey-Glass state became non-finite at sample " + std::to_string(n));
    out.push_back(mg.value());
  }
  return out;
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kLxx: return "LXX";
    case TaskKind::kLxz: return "LXZ";
    case TaskKind::kMg: return "MG";
  }
  return "?";
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "LXX" || name == "lxx") return TaskKind::kLxx;
  if (name == "LXZ" || name == "lxz") return TaskKind::kLxz;
  if (name == "MG" || name == "mg") return TaskKind::kMg;
  throw ConfigError("unknown task '" + name + "'");
}

TaskDataset make_task(std::span<const double> series, TaskKind kind, std::size_t n_train, std::span<const double> cross) {
  const bool ahead = kind != TaskKind::kLxz;
  if (!ahead && cross.size() != series.size()) throw ValueError("LXZ needs a z series of the same length as x");
  const std::size_t n = ahead ? (series.size() >= 1 ? series.size() - 1 : 0) : series.size();
  if (n < 2) throw ValueError("series too short for a task");
  if (n_train == 0 || n_train > n) n_train = n;
  // Scaling span: training inputs, plus the last training target for one-step-ahead tasks.
  const std::size_t span_len = ahead ? n_train + 1 : n_train;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(span_len));
  if (!(*hi > *lo)) throw ValueError("cannot scale a constant series");

  TaskDataset out;
  out.kind = kind;
  out.scaling = {*lo, *hi};
  out.n_train = n_train;
  out.inputs.resize(n);
  out.targets.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double u = out.scaling.scale(series[k]);
    if (u > 1.0 || u < -1.0) {
      ++out.clip_count;
      u = std::clamp(u, -1.0, 1.0);
    }
    out.inputs[k] = u;
    out.targets[k] = ahead ? series[k + 1] : cross[k];
  }
  return out;
}

TaskDataset make_task(const LorenzSeries& lorenz, TaskKind kind, std::size_t n_train) {
  if (kind == TaskKind::kMg) throw ValueError("MG task needs a Mackey-Glass series");
  return make_task(lorenz.x, kind, n_train, kind == TaskKind::kLxz ? std::span<const double>(lorenz.z) : std::span<const double>{});
}

void write_series(const std::filesystem::path& path, const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) throw ValueError("no series columns to write");
  const std::size_t n = columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != n) throw ValueError("series columns differ in length");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ' ';
      out << fmt17(columns[c][r]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<std::vector<double>> read_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> columns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (columns.empty()) columns.resize(row.size());
    if (row.size() != columns.size() || row.empty()) {
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) + ": wrong column count");
    }
    for (std::size_t c = 0; c < row.size(); ++c) columns[c].push_back(row[c]);
  }
  return columns;
}

std::string spec_hash(const LorenzSpec& s, std::size_t n_samples) {
  std::ostringstream os;
  os << "lorenz:" << fmt17(s.sigma) << ',' << fmt17(s.rho) << ',' << fmt17(s.beta) << ',' << fmt17(s.dt) << ','
     << fmt17(s.sample_interval) << ',' << fmt17(s.transient) << ',' << fmt17(s.initial[0]) << ','
     << fmt17(s.initial[1]) << ',' << fmt17(s.initial[2]) << ',' << fmt17(s.initial_jitter) << ',' << s.seed << ','
     << n_samples;
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
  return buf;
}

std::string spec_hash(const MackeyGlassSpec& s, std::size_t n_samples) {
  std::ostringstream os;
  os << "mackey-glass:" << fmt17(s.beta) << ',' << fmt17(s.gamma) << ',' << fmt17(s.exponent) << ','
     << fmt17(s.delay) << ',' << fmt17(s.dt) << ',' << fmt17(s.sample_interval) << ',' << fmt17(s.history) << ','
     << fmt17(s.transient) << ',' << n_samples;
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
  return buf;
}

}  // namespace qrc
