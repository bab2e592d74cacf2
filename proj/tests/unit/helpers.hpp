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

// Random fixtures and independent reference implementations shared by the
// unit tests.

#include <Eigen/Dense>
#include <Eigen/QR>

#include "qrc/quantum.hpp"
#include "qrc/rng.hpp"

namespace qrc::testing {

inline ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(rng.normal(), rng.normal());
  }
  return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index dim, Rng& rng) {
  const ComplexMatrix a = random_complex(dim, dim, rng);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_unitary(Eigen::Index dim, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(dim, dim, rng));
  return qr.householderQ() * ComplexMatrix::Identity(dim, dim);
}

// Full-rank mixed state A A^dagger / Tr.
inline ComplexMatrix random_density(Eigen::Index dim, Rng& rng) {
  const ComplexMatrix a = random_complex(dim, dim, rng);
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

// Index-by-index contraction over the leading qubit.
inline ComplexMatrix brute_partial_trace_first(const ComplexMatrix& rho) {
  const Eigen::Index half = rho.rows() / 2;
  ComplexMatrix out = ComplexMatrix::Zero(half, half);
  for (Eigen::Index i = 0; i < half; ++i) {
    for (Eigen::Index j = 0; j < half; ++j) {
      for (Eigen::Index k = 0; k < 2; ++k) out(i, j) += rho(k * half + i, k * half + j);
    }
  }
  return out;
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace qrc::testing
