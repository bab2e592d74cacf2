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

#include "qrc/quantum.hpp"
#include "qrc/rng.hpp"

namespace qrc {

/// Fully connected transverse-field Ising model
///   H = 1/2 sum_i h sigma_z^(i) + sum_{i<j} J_ij sigma_x^(i) sigma_x^(j)
/// with J_ij ~ U([coupling_low, coupling_high]).
struct TfimSpec {
  std::size_t n_qubits = 4;
  double field_strength = 1.0;
  double coupling_low = 0.0;
  double coupling_high = 1.0;
  bool normalize_spectral_radius = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Upper-triangular coupling matrix; entries below and on the diagonal are zero.
using Couplings = RealMatrix;

/// Draws J_ij for i < j in row-major order from `rng`.
Couplings sample_couplings(const TfimSpec& spec, Rng& rng);
/// Same, with a generator seeded from spec.seed.
Couplings sample_couplings(const TfimSpec& spec);

ComplexMatrix build_tfim(const TfimSpec& spec, const Couplings& couplings);

/// Hopping model in the rotating frame with a sigma_y drive on qubit 0:
///   H(s) = sum_{i<j} J_ij (s+_i s-_j + s-_i s+_j) + s sigma_y^(0).
struct DrivenTfimSpec {
  std::size_t n_qubits = 4;
  Couplings couplings;
  std::size_t drive_target_qubit = 0;

  void validate() const;
};

/// H(s) = hopping + s * drive, split so H(s) is cheap to form per input.
struct DrivenTfim {
  ComplexMatrix hopping;
  ComplexMatrix drive;

  ComplexMatrix at(double s) const { return hopping + s * drive; }
};

DrivenTfim make_driven_tfim(const DrivenTfimSpec& spec);
ComplexMatrix build_driven_tfim(const DrivenTfimSpec& spec, double s);

/// max |eigenvalue| of a Hermitian matrix.
double spectral_radius(const ComplexMatrix& hamiltonian);

}  // namespace qrc
