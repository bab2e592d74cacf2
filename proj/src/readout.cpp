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

#include "qrc/readout.hpp"

#include <cmath>
#include <limits>

#include "qrc/errors.hpp"

namespace qrc {

double NoiseSpec::stddev() const {
  if (!(n_measurements >= 1.0)) throw ConfigError("n_measurements must be >= 1");
  double s = std::isinf(n_measurements) ? 0.0 : 1.0 / std::sqrt(n_measurements);
  if (wmp_strength) {
    const double sine = std::sin(*wmp_strength);
    if (!(sine > 0.0)) throw RangeError("weak-measurement noise is unbounded at measurement strength 0");
    s /= sine;
  }
  return s;
}

ReadoutTrace add_shot_noise(const ReadoutTrace& trace, const NoiseSpec& spec, Rng& rng) {
  const double sd = spec.stddev();
  ReadoutTrace out = trace;
  if (sd == 0.0) return out;
  // Row-major draw order so the noise stream does not depend on storage layout.
  for (Eigen::Index r = 0; r < out.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.values.cols(); ++c) out.values(r, c) += sd * rng.normal();
  }
  return out;
}

ReadoutTrace add_shot_noise(const ReadoutTrace& trace, const NoiseSpec& spec) {
  Rng rng(spec.seed);
  return add_shot_noise(trace, spec, rng);
}

ReadoutSolver::ReadoutSolver(const RealMatrix& x, const ReadoutOptions& options) : options_(options) {
  if (x.rows() < 1 || x.cols() < 1) throw ShapeError("readout training matrix is empty");
  if (!x.allFinite()) throw ValueError("readout training matrix has non-finite entries");
  if (options.ridge < 0.0) throw ConfigError("ridge penalty must be >= 0");
  means_ = options.fit_intercept ? RealVector(x.colwise().mean().transpose()) : RealVector::Zero(x.cols());
  x_ = x.rowwise() - means_.transpose();
  Eigen::BDCSVD<RealMatrix> svd(x_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? options.rcond * s(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  u_ = svd.matrixU().leftCols(rank);
  singular_ = s.head(rank);
  v_ = svd.matrixV().leftCols(rank);
}

RealMatrix ReadoutSolver::solve(const RealMatrix& targets) const {
  if (targets.rows() != u_.rows()) throw ShapeError("target length does not match readout rows");
  RealMatrix centered = targets;
  if (options_.fit_intercept) centered.rowwise() -= targets.colwise().mean();
  RealMatrix coeff = u_.transpose() * centered;
  for (Eigen::Index k = 0; k < singular_.size(); ++k) {
    const double s = singular_(k);
    coeff.row(k) *= s / (s * s + options_.ridge);
  }
  return v_ * coeff;
}

RealVector ReadoutSolver::intercepts(const RealMatrix& targets, const RealMatrix& weights) const {
  if (!options_.fit_intercept) return RealVector::Zero(targets.cols());
  return targets.colwise().mean().transpose() - weights.transpose() * means_;
}

TrainedReadout ReadoutSolver::fit(std::span<const double> target) const {
  const Eigen::Map<const RealVector> f(target.data(), static_cast<Eigen::Index>(target.size()));
  const RealMatrix fm = f;
  TrainedReadout out;
  const RealMatrix w = solve(fm);
  out.weights = w.col(0);
  out.intercept = intercepts(fm, w)(0);
  const RealVector fitted = (x_ * out.weights).array() + (f.mean() * (options_.fit_intercept ? 1.0 : 0.0));
  if (target.size() >= 2 && (f.array() - f.mean()).square().sum() > 0.0) {
    out.training_nrmse = nrmse(std::span<const double>(fitted.data(), static_cast<std::size_t>(fitted.size())), target);
  } else {
    out.training_nrmse = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

TrainedReadout train_readout(const RealMatrix& x, std::span<const double> target, const ReadoutOptions& options) {
  if (static_cast<std::size_t>(x.rows()) != target.size()) throw ShapeError("trace rows and target length differ");
  return ReadoutSolver(x, options).fit(target);
}

TrainedReadout train_readout(const ReadoutTrace& x, std::span<const double> target, const ReadoutOptions& options) {
  return train_readout(x.values, target, options);
}

RealVector predict(const RealMatrix& x, const RealVector& weights) {
  if (x.cols() != weights.size()) throw ShapeError("weight count does not match trace columns");
  return x * weights;
}

RealVector predict(const RealMatrix& x, const TrainedReadout& readout) {
  return predict(x, readout.weights).array() + readout.intercept;
}

RealVector predict(const ReadoutTrace& x, const RealVector& weights) { return predict(x.values, weights); }

double nrmse(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size()) throw ShapeError("prediction and target lengths differ");
  if (target.size() < 2) throw ShapeError("NRMSE needs at least two samples");
  const auto n = static_cast<double>(target.size());
  double mean = 0.0;
  for (double t : target) mean += t;
  mean /= n;
  double var = 0.0;
  double mse = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    var += (target[k] - mean) * (target[k] - mean);
    mse += (prediction[k] - target[k]) * (prediction[k] - target[k]);
  }
  if (var == 0.0) throw ValueError("NRMSE is undefined for a constant target");
  return std::sqrt(mse / var);
}

}  // namespace qrc
