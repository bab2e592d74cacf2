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

#include <cstdint>
#include <optional>
#include <span>

#include "qrc/protocols.hpp"
#include "qrc/rng.hpp"

namespace qrc {

/// Gaussian shot noise with std = 1/sqrt(N_meas), scaled by 1/sin(theta)
/// when a weak-measurement strength is given. N_meas = +inf means no noise.
struct NoiseSpec {
  double n_measurements = 1e10;
  std::optional<double> wmp_strength;
  std::uint64_t seed = 0;

  double stddev() const;
};

ReadoutTrace add_shot_noise(const ReadoutTrace& trace, const NoiseSpec& spec, Rng& rng);
ReadoutTrace add_shot_noise(const ReadoutTrace& trace, const NoiseSpec& spec);

struct ReadoutOptions {
  /// Fit an intercept by centering columns and target on their training means.
  bool fit_intercept = false;
  /// Singular values below rcond * s_max are discarded.
  double rcond = 1e-12;
  /// Ridge penalty; 0 gives the plain least-squares minimizer.
  double ridge = 0.0;
};

struct TrainedReadout {
  RealVector weights;
  double intercept = 0.0;
  double training_nrmse = 0.0;
};

/// Least-squares readout solver. Factorizes X once (thin SVD) so that many
/// targets can be fitted against the same trace.
class ReadoutSolver {
 public:
  explicit ReadoutSolver(const RealMatrix& x, const ReadoutOptions& options = {});

  std::size_t rows() const noexcept { return static_cast<std::size_t>(u_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(v_.rows()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(singular_.size()); }
  const RealVector& column_means() const noexcept { return means_; }

  /// Weights for each column of `targets` (rows() x k) as a cols() x k matrix.
  RealMatrix solve(const RealMatrix& targets) const;
  /// Intercepts matching solve(); zero when fit_intercept is off.
  RealVector intercepts(const RealMatrix& targets, const RealMatrix& weights) const;

  TrainedReadout fit(std::span<const double> target) const;

 private:
  ReadoutOptions options_;
  RealVector means_;
  RealMatrix u_;
  RealVector singular_;
  RealMatrix v_;
  RealMatrix x_;
};

TrainedReadout train_readout(const RealMatrix& x, std::span<const double> target, const ReadoutOptions& options = {});
TrainedReadout train_readout(const ReadoutTrace& x, std::span<const double> target, const ReadoutOptions& options = {});

RealVector predict(const RealMatrix& x, const TrainedReadout& readout);
RealVector predict(const RealMatrix& x, const RealVector& weights);
RealVector predict(const ReadoutTrace& x, const RealVector& weights);

/// sqrt(MSE / Var(target)); throws ValueError for a constant target.
double nrmse(std::span<const double> prediction, std::span<const double> target);

}  // namespace qrc
