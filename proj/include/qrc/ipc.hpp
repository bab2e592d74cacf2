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

// Information processing capacity over products of Legendre polynomials of
// delayed inputs, for inputs uniform on [-1, 1].

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qrc/protocols.hpp"
#include "qrc/readout.hpp"
#include "qrc/rng.hpp"

namespace qrc {

inline constexpr unsigned kMaxIpcDegree = 6;

/// l_n(x) by the three-term recurrence.
double legendre(unsigned n, double x);

struct TargetTerm {
  unsigned degree = 1;
  std::size_t delay = 0;

  friend bool operator==(const TargetTerm&, const TargetTerm&) = default;
};

/// Product of l_{k_i}(u_{t - d_i}) with strictly decreasing delays d_i.
struct TargetSpec {
  std::vector<TargetTerm> terms;

  unsigned total_degree() const noexcept;
  std::size_t max_delay() const noexcept { return terms.empty() ? 0 : terms.front().delay; }
  void validate() const;
  /// e.g. "l1(3)*l2(0)".
  std::string label() const;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct IpcBudget {
  unsigned max_total_degree = 6;
  std::map<unsigned, std::size_t> max_delay_per_degree{{1, 60}, {2, 30}, {3, 15}, {4, 10}, {5, 8}, {6, 6}};
  /// Stop extending a family's leading delay after this many consecutive
  /// delays without a surviving capacity; 0 disables early stopping.
  std::size_t early_stop_window = 5;

  void validate() const;
  std::size_t max_delay(unsigned degree) const;
  /// Largest delay over all enabled degrees.
  std::size_t max_delay() const;
};

/// All targets, ordered by (total degree, term count, delays, degrees).
std::vector<TargetSpec> enumerate_targets(const IpcBudget& budget);

/// Target values for rows t = first_row .. inputs.size() - 1.
RealVector build_target(const TargetSpec& spec, std::span<const double> inputs, std::size_t first_row);

/// Squared Pearson correlation; 0 when either side has zero variance.
double capacity(std::span<const double> target, std::span<const double> prediction);

struct CutoffConfig {
  std::size_t n_shuffles = 100;
  double quantile = 0.999;
  std::uint64_t seed = 0;
};

struct IpcConfig {
  CutoffConfig cutoff;
  /// Trailing fraction of rows on which capacities are scored.
  double held_out_fraction = 0.1;
  bool fit_intercept = true;
  double rcond = 1e-12;
  std::size_t n_threads = 1;
  /// Keep every evaluated target's capacity in the report.
  bool record_targets = false;

  void validate() const;
};

/// Trains readouts on the leading rows of a trace and scores capacities on
/// the trailing held-out rows. Rows before `first_row` are dropped so every
/// delayed target is defined.
class CapacityEvaluator {
 public:
  CapacityEvaluator(const RealMatrix& trace, std::size_t first_row, const IpcConfig& config);

  std::size_t first_row() const noexcept { return first_row_; }
  std::size_t n_train() const noexcept { return n_train_; }
  std::size_t n_test() const noexcept { return n_test_; }

  /// Held-out capacity for each target column (rows first_row .. end).
  RealVector evaluate(const RealMatrix& targets) const;
  RealVector evaluate(std::span<const TargetSpec> specs, std::span<const double> inputs) const;

 private:
  std::size_t first_row_;
  std::size_t n_train_;
  std::size_t n_test_;
  std::size_t threads_;
  ReadoutSolver solver_;
  RealMatrix test_centered_;
};

/// Quantile function of the chi-squared distribution with one degree of freedom.
double chi_squared_1_quantile(double q);

/// Null-distribution quantile of capacities against targets built from
/// independently shuffled inputs: the larger of the empirical quantile and
/// the quantile of a scaled chi-squared(1) law fitted to the null mean.
double shuffle_cutoff(const CapacityEvaluator& evaluator, const TargetSpec& spec, std::span<const double> inputs,
                      std::size_t n_shuffles, double quantile, Rng& rng);
double shuffle_cutoff(const ReadoutTrace& trace, const TargetSpec& spec, std::span<const double> inputs,
                      std::size_t n_shuffles, double quantile, Rng& rng, const IpcConfig& config = {});

/// Linear-interpolation sample quantile (q in [0, 1]).
double sample_quantile(std::vector<double> values, double q);

struct TargetCapacity {
  TargetSpec spec;
  double capacity = 0.0;
  bool survived = false;
};

struct FamilyCutoff {
  unsigned degree = 0;
  std::size_t n_terms = 0;
  double cutoff = 0.0;
};

struct IpcReport {
  std::array<double, kMaxIpcDegree> per_degree{};
  double linear = 0.0;
  double nonlinear = 0.0;
  double total = 0.0;
  /// Largest per-family cutoff.
  double cutoff_value = 0.0;
  std::size_t n_targets_evaluated = 0;
  std::size_t n_targets_surviving = 0;
  std::size_t n_readout_nodes = 0;
  std::vector<FamilyCutoff> family_cutoffs;
  std::vector<TargetCapacity> targets;
};

IpcReport compute_ipc(const ReadoutTrace& trace, std::span<const double> inputs, const IpcBudget& budget,
                      const IpcConfig& config = {});

}  // namespace qrc
