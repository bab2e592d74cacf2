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

// Chaotic benchmark series and the one-step prediction tasks built on them.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qrc {

struct LorenzSpec {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double dt = 0.001;
  double sample_interval = 0.1;
  double transient = 100.0;
  std::array<double, 3> initial{1.0, 1.0, 1.0};
  /// Initial state is perturbed by initial_jitter * U(-1, 1) per component.
  double initial_jitter = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t steps_per_sample() const;
};

struct LorenzSeries {
  std::vector<double> x, y, z;

  std::size_t size() const noexcept { return x.size(); }
};

std::array<double, 3> lorenz_derivative(const LorenzSpec& spec, const std::array<double, 3>& state);
/// `n_steps` RK4 steps of size dt from `state`.
std::array<double, 3> lorenz_advance(const LorenzSpec& spec, std::array<double, 3> state, double dt,
                                     std::size_t n_steps);
LorenzSeries integrate_lorenz(const LorenzSpec& spec, std::size_t n_samples);

struct MackeyGlassSpec {
  double beta = 0.2;
  double gamma = 0.1;
  double exponent = 10.0;
  double delay = 18.0;
  double dt = 0.1;
  double sample_interval = 3.0;
  double history = 1.2;
  double transient = 1000.0;

  void validate() const;
  std::size_t delay_steps() const;
  std::size_t steps_per_sample() const;
};

/// RK4 integrator for the Mackey-Glass delay equation. The delayed value
/// at RK4 half steps is linearly interpolated between stored grid points.
class MackeyGlassIntegrator {
 public:
  /// Constant initial history.
  explicit MackeyGlassIntegrator(const MackeyGlassSpec& spec);
  /// Explicit history on the dt grid: history[i] = x(t0 - delay + i dt),
  /// the last entry being the current value.
  MackeyGlassIntegrator(const MackeyGlassSpec& spec, std::vector<double> history);

  double value() const noexcept;
  void step();
  void advance(std::size_t n_steps);
  /// Grid values over [t - delay, t].
  std::vector<double> history() const;

 private:
  double rate(double x, double delayed) const;

  MackeyGlassSpec spec_;
  std::size_t lag_;
  std::vector<double> ring_;  // lag_ + 1 grid values; ring_[head_] is the oldest
  std::size_t head_ = 0;
};

std::vector<double> integrate_mackey_glass(const MackeyGlassSpec& spec, std::size_t n_samples);

enum class TaskKind { kLxx, kLxz, kMg };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& name);

struct ScalingRecord {
  double min = 0.0;
  double max = 1.0;

  double scale(double v) const noexcept { return 2.0 * (v - min) / (max - min) - 1.0; }
  double unscale(double s) const noexcept { return min + 0.5 * (s + 1.0) * (max - min); }
};

struct TaskDataset {
  TaskKind kind = TaskKind::kLxx;
  std::vector<double> inputs;   // in [-1, 1]
  std::vector<double> targets;  // original units
  ScalingRecord scaling;
  std::size_t n_train = 0;      // leading samples that defined the scaling
  std::size_t clip_count = 0;   // later inputs clipped to +-1
};

/// Packages a series into a task. `series` is the scalar input series (x
/// for the Lorenz tasks, the Mackey-Glass series for MG); `cross` is the
/// Lorenz z series, required for LXZ only. Inputs are min-max scaled to
/// [-1, 1] with the extrema of the first n_train samples (all when 0);
/// for the one-step-ahead tasks that span includes the target sample.
TaskDataset make_task(std::span<const double> series, TaskKind kind, std::size_t n_train = 0,
                      std::span<const double> cross = {});
TaskDataset make_task(const LorenzSeries& lorenz, TaskKind kind, std::size_t n_train = 0);

/// Series cache: one sample per line, components separated by a space,
/// 17 significant digits.
void write_series(const std::filesystem::path& path, const std::vector<std::vector<double>>& columns);
std::vector<std::vector<double>> read_series(const std::filesystem::path& path);

std::string spec_hash(const LorenzSpec& spec, std::size_t n_samples);
std::string spec_hash(const MackeyGlassSpec& spec, std::size_t n_samples);

}  // namespace qrc
