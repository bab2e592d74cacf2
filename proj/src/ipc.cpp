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

#include "qrc/ipc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qrc/errors.hpp"
#include "qrc/parallel.hpp"

namespace qrc {

double legendre(unsigned n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (unsigned k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return cur;
}

unsigned TargetSpec::total_degree() const noexcept {
  unsigned d = 0;
  for (const auto& t : terms) d += t.degree;
  return d;
}

void TargetSpec::validate() const {
  if (terms.empty()) throw ValueError("target has no terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].degree < 1) throw ValueError("target term degree must be >= 1");
    if (i > 0 && !(terms[i].delay < terms[i - 1].delay)) throw ValueError("target delays must be strictly decreasing");
  }
  const unsigned d = total_degree();
  if (d < 1 || d > kMaxIpcDegree) throw ValueError("target total degree must lie in [1, 6]");
}

std::string TargetSpec::label() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) os << '*';
    os << 'l' << terms[i].degree << '(' << terms[i].delay << ')';
  }
  return os.str();
}

void IpcBudget::validate() const {
  if (max_total_degree < 1 || max_total_degree > kMaxIpcDegree) throw ConfigError("max_total_degree must lie in [1, 6]");
  for (unsigned d = 1; d <= max_total_degree; ++d) {
    if (!max_delay_per_degree.contains(d)) throw ConfigError("missing delay cap for degree " + std::to_string(d));
  }
}

std::size_t IpcBudget::max_delay(unsigned degree) const {
  const auto it = max_delay_per_degree.find(degree);
  if (it == max_delay_per_degree.end()) throw ConfigError("missing delay cap for degree " + std::to_string(degree));
  return it->second;
}

std::size_t IpcBudget::max_delay() const {
  std::size_t m = 0;
  for (unsigned d = 1; d <= max_total_degree; ++d) m = std::max(m, max_delay(d));
  return m;
}

namespace {

// Strictly decreasing delay tuples from [0, cap], in ascending lexicographic order.
void delay_sets(std::size_t m, std::size_t cap, std::vector<std::size_t>& cur,
                std::vector<std::vector<std::size_t>>& out) {
  const std::size_t pos = cur.size();
  if (pos == m) {
    out.push_back(cur);
    return;
  }
  const std::size_t remaining = m - pos - 1;  // slots after this one need distinct smaller values
  const std::size_t hi = pos == 0 ? cap : cur.back() - 1;
  if (pos > 0 && cur.back() == 0) return;
  for (std::size_t d = remaining; d <= hi; ++d) {
    cur.push_back(d);
    delay_sets(m, cap, cur, out);
    cur.pop_back();
  }
}

// Compositions of `total` into m positive parts, ascending lexicographic.
void compositions(unsigned total, std::size_t m, std::vector<unsigned>& cur, std::vector<std::vector<unsigned>>& out) {
  if (cur.size() + 1 == m) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  const std::size_t slots_after = m - cur.size() - 1;
  for (unsigned k = 1; k + slots_after <= total; ++k) {
    cur.push_back(k);
    compositions(total - k, m, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<TargetSpec> enumerate_targets(const IpcBudget& budget) {
  budget.validate();
  std::vector<TargetSpec> out;
  for (unsigned degree = 1; degree <= budget.max_total_degree; ++degree) {
    const std::size_t cap = budget.max_delay(degree);
    for (std::size_t m = 1; m <= degree && m <= cap + 1; ++m) {
      std::vector<std::vector<std::size_t>> delays;
      std::vector<std::size_t> dcur;
      delay_sets(m, cap, dcur, delays);
      std::vector<std::vector<unsigned>> parts;
      std::vector<unsigned> pcur;
      compositions(degree, m, pcur, parts);
      for (const auto& ds : delays) {
        for (const auto& ps : parts) {
          TargetSpec spec;
          for (std::size_t i = 0; i < m; ++i) spec.terms.push_back({ps[i], ds[i]});
          out.push_back(std::move(spec));
        }
      }
    }
  }
  return out;
}

RealVector build_target(const TargetSpec& spec, std::span<const double> inputs, std::size_t first_row) {
  spec.validate();
  if (first_row < spec.max_delay()) throw ValueError("first_row is smaller than the target's largest delay");
  if (first_row >= inputs.size()) throw ValueError("first_row leaves no target rows");
  const std::size_t n = inputs.size() - first_row;
  RealVector f = RealVector::Ones(static_cast<Eigen::Index>(n));
  for (const auto& term : spec.terms) {
    for (std::size_t r = 0; r < n; ++r) {
      f(static_cast<Eigen::Index>(r)) *= legendre(term.degree, inputs[first_row + r - term.delay]);
    }
  }
  return f;
}

double capacity(std::span<const double> target, std::span<const double> prediction) {
  if (target.size() != prediction.size()) throw ShapeError("capacity: length mismatch");
  if (target.size() < 2) throw ShapeError("capacity needs at least two samples");
  const Eigen::Map<const RealVector> f(target.data(), static_cast<Eigen::Index>(target.size()));
  const Eigen::Map<const RealVector> g(prediction.data(), static_cast<Eigen::Index>(prediction.size()));
  const RealVector fc = f.array() - f.mean();
  const RealVector gc = g.array() - g.mean();
  const double vf = fc.squaredNorm();
  const double vg = gc.squaredNorm();
  if (!(vf > 0.0) || !(vg > 0.0)) return 0.0;
  const double c = fc.dot(gc);
  return std::clamp(c * c / (vf * vg), 0.0, 1.0);
}

void IpcConfig::validate() const {
  if (!(held_out_fraction > 0.0 && held_out_fraction < 1.0)) throw ConfigError("held_out_fraction must lie in (0, 1)");
  if (cutoff.n_shuffles < 20) throw ConfigError("n_shuffles must be at least 20");
  if (!(cutoff.quantile >= 0.0 && cutoff.quantile <= 1.0)) throw ConfigError("cutoff quantile must lie in [0, 1]");
}

namespace {

std::size_t held_out_rows(std::size_t n, double fraction) {
  const auto test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
  return std::clamp<std::size_t>(test, 2, n > 4 ? n - 2 : 2);
}

RealMatrix leading_rows(const RealMatrix& trace, std::size_t first_row, const IpcConfig& config) {
  config.validate();
  if (first_row >= static_cast<std::size_t>(trace.rows())) throw ShapeError("trace is shorter than the largest delay");
  const std::size_t n = static_cast<std::size_t>(trace.rows()) - first_row;
  if (n < 8) throw ShapeError("too few trace rows for capacity evaluation");
  const std::size_t n_test = held_out_rows(n, config.held_out_fraction);
  return trace.middleRows(static_cast<Eigen::Index>(first_row), static_cast<Eigen::Index>(n - n_test));
}

ReadoutOptions solver_options(const IpcConfig& config) {
  ReadoutOptions o;
  o.fit_intercept = config.fit_intercept;
  o.rcond = config.rcond;
  return o;
}

}  // namespace

CapacityEvaluator::CapacityEvaluator(const RealMatrix& trace, std::size_t first_row, const IpcConfig& config)
    : first_row_(first_row),
      threads_(std::max<std::size_t>(1, config.n_threads)),
      solver_(leading_rows(trace, first_row, config), solver_options(config)) {
  n_train_ = solver_.rows();
  n_test_ = static_cast<std::size_t>(trace.rows()) - first_row - n_train_;
  test_centered_ = trace.bottomRows(static_cast<Eigen::Index>(n_test_)).rowwise() - solver_.column_means().transpose();
}

RealVector CapacityEvaluator::evaluate(const RealMatrix& targets) const {
  const auto n_train = static_cast<Eigen::Index>(n_train_);
  const auto n_test = static_cast<Eigen::Index>(n_test_);
  if (targets.rows() != n_train + n_test) throw ShapeError("target rows do not match the evaluator");
  const RealMatrix weights = solver_.solve(targets.topRows(n_train));
  const RealMatrix prediction = test_centered_ * weights;
  RealVector out(targets.cols());
  for (Eigen::Index c = 0; c < targets.cols(); ++c) {
    const RealVector f = targets.col(c).tail(n_test);
    const RealVector g = prediction.col(c);
    out(c) = capacity(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())),
                      std::span<const double>(g.data(), static_cast<std::size_t>(g.size())));
  }
  return out;
}

RealVector CapacityEvaluator::evaluate(std::span<const TargetSpec> specs, std::span<const double> inputs) const {
  const std::size_t n_rows = n_train_ + n_test_;
  if (inputs.size() != first_row_ + n_rows) throw ShapeError("input length does not match the evaluated trace");
  constexpr std::size_t kBatch = 64;
  const std::size_t n_batches = (specs.size() + kBatch - 1) / kBatch;
  RealVector out(static_cast<Eigen::Index>(specs.size()));
  parallel_for(n_batches, threads_, [&](std::size_t b) {
    const std::size_t begin = b * kBatch;
    const std::size_t end = std::min(specs.size(), begin + kBatch);
    RealMatrix targets(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      targets.col(static_cast<Eigen::Index>(i - begin)) = build_target(specs[i], inputs, first_row_);
    }
    out.segment(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin)) = evaluate(targets);
  });
  return out;
}

double sample_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValueError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValueError("quantile must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double chi_squared_1_quantile(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValueError("quantile must lie in [0, 1]");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return std::numeric_limits<double>::infinity();
  // P(chi2_1 <= x) = erf(sqrt(x / 2)); bisect erfc(z) = 1 - q on z, which
  // keeps full relative accuracy deep in the tail.
  const double tail = 1.0 - q;
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid) > tail ? lo : hi) = mid;
  }
  const double z = 0.5 * (lo + hi);
  return 2.0 * z * z;
}

double shuffle_cutoff(const CapacityEvaluator& evaluator, const TargetSpec& spec, std::span<const double> inputs,
                      std::size_t n_shuffles, double quantile, Rng& rng) {
  if (n_shuffles < 20) throw ConfigError("n_shuffles must be at least 20");
  const std::size_t n_rows = evaluator.n_train() + evaluator.n_test();
  RealMatrix targets(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_shuffles));
  std::vector<double> shuffled(inputs.begin(), inputs.end());
  for (std::size_t s = 0; s < n_shuffles; ++s) {
    rng.shuffle(std::span<double>(shuffled));
    targets.col(static_cast<Eigen::Index>(s)) = build_target(spec, shuffled, evaluator.first_row());
  }
  const RealVector null = evaluator.evaluate(targets);
  // A held-out capacity of an unrelated target is a squared, asymptotically
  // Gaussian correlation, i.e. a scaled chi-squared(1) variable. A sample of
  // n_shuffles cannot resolve quantiles beyond 1 - 1/n_shuffles (the
  // empirical 0.999 quantile of 100 values is their maximum, roughly the
  // 0.99 point), so the fitted tail takes over there.
  const double empirical = sample_quantile(std::vector<double>(null.data(), null.data() + null.size()), quantile);
  return std::max(empirical, null.mean() * chi_squared_1_quantile(quantile));
}

double shuffle_cutoff(const ReadoutTrace& trace, const TargetSpec& spec, std::span<const double> inputs,
                      std::size_t n_shuffles, double quantile, Rng& rng, const IpcConfig& config) {
  if (inputs.size() != trace.n_steps()) throw ShapeError("inputs and trace rows differ");
  const CapacityEvaluator evaluator(trace.values, spec.max_delay(), config);
  return shuffle_cutoff(evaluator, spec, inputs, n_shuffles, quantile, rng);
}

IpcReport compute_ipc(const ReadoutTrace& trace, std::span<const double> inputs, const IpcBudget& budget,
                      const IpcConfig& config) {
  budget.validate();
  config.validate();
  if (inputs.size() != trace.n_steps()) throw ShapeError("inputs and trace rows differ");
  for (double u : inputs) {
    if (!(std::abs(u) <= 1.0)) throw RangeError("IPC inputs must lie in [-1, 1]");
  }
  const std::vector<TargetSpec> all = enumerate_targets(budget);
  const CapacityEvaluator evaluator(trace.values, budget.max_delay(), config);

  IpcReport report;
  report.n_readout_nodes = trace.n_nodes();
  std::size_t family_index = 0;
  auto it = all.begin();
  while (it != all.end()) {
    // A family shares total degree and term count; it is contiguous in `all`.
    const unsigned degree = it->total_degree();
    const std::size_t n_terms = it->terms.size();
    auto family_end = std::find_if(it, all.end(), [&](const TargetSpec& s) {
      return s.total_degree() != degree || s.terms.size() != n_terms;
    });
    Rng rng(derive_seed(config.cutoff.seed, {family_index++}));
    const double cutoff = shuffle_cutoff(evaluator, *it, inputs, config.cutoff.n_shuffles, config.cutoff.quantile, rng);
    report.family_cutoffs.push_back({degree, n_terms, cutoff});
    report.cutoff_value = std::max(report.cutoff_value, cutoff);

    std::size_t misses = 0;
    auto group = it;
    while (group != family_end) {
      const std::size_t lead = group->max_delay();
      auto group_end = std::find_if(group, family_end, [&](const TargetSpec& s) { return s.max_delay() != lead; });
      const std::span<const TargetSpec> specs(&*group, static_cast<std::size_t>(group_end - group));
      const RealVector caps = evaluator.evaluate(specs, inputs);
      bool any = false;
      for (std::size_t i = 0; i < specs.size(); ++i) {
        const double c = caps(static_cast<Eigen::Index>(i));
        const bool survived = c > cutoff;
        if (survived) {
          report.per_degree[degree - 1] += c;
          ++report.n_targets_surviving;
          any = true;
        }
        if (config.record_targets) report.targets.push_back({specs[i], c, survived});
      }
      report.n_targets_evaluated += specs.size();
      misses = any ? 0 : misses + 1;
      group = group_end;
      if (budget.early_stop_window > 0 && misses >= budget.early_stop_window) break;
    }
    it = family_end;
  }
  report.linear = report.per_degree[0];
  for (unsigned d = 2; d <= kMaxIpcDegree; ++d) report.nonlinear += report.per_degree[d - 1];
  report.total = report.linear + report.nonlinear;
  return report;
}

}  // namespace qrc
