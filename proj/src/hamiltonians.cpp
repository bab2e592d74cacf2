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

#include "qrc/hamiltonians.hpp"

#include <cmath>

#include "qrc/errors.hpp"

namespace qrc {

void TfimSpec::validate() const {
  if (n_qubits < 1 || n_qubits > 12) throw ConfigError("TFIM qubit count must be in [1, 12]");
  if (!(coupling_low <= coupling_high)) throw ConfigError("coupling_low must not exceed coupling_high");
  if (!std::isfinite(field_strength)) throw ConfigError("field strength must be finite");
}

Couplings sample_couplings(const TfimSpec& spec, Rng& rng) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n_qubits);
  Couplings j = Couplings::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) j(a, b) = rng.uniform(spec.coupling_low, spec.coupling_high);
  }
  return j;
}

Couplings sample_couplings(const TfimSpec& spec) {
  Rng rng(spec.seed);
  return sample_couplings(spec, rng);
}

ComplexMatrix build_tfim(const TfimSpec& spec, const Couplings& couplings) {
  spec.validate();
  const std::size_t n = spec.n_qubits;
  if (couplings.rows() != static_cast<Eigen::Index>(n) || couplings.cols() != couplings.rows()) {
    throw DimensionError("coupling matrix does not match qubit count");
  }
  const std::size_t dim = std::size_t{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const ComplexMatrix z = pauli_z();
  const ComplexMatrix x = pauli_x();
  for (std::size_t i = 0; i < n; ++i) h += 0.5 * spec.field_strength * embed(z, i, n);
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexMatrix xi = embed(x, i, n);
    for (std::size_t k = i + 1; k < n; ++k) {
      const double jik = couplings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (jik != 0.0) h += jik * (xi * embed(x, k, n));
    }
  }
  if (spec.normalize_spectral_radius) {
    const double radius = spectral_radius(h);
    if (radius == 0.0) throw ValueError("cannot normalize a Hamiltonian with zero spectral radius");
    h /= radius;
  }
  return h;
}

void DrivenTfimSpec::validate() const {
  if (n_qubits < 1 || n_qubits > 12) throw ConfigError("driven TFIM qubit count must be in [1, 12]");
  if (couplings.rows() != static_cast<Eigen::Index>(n_qubits) || couplings.cols() != couplings.rows()) {
    throw DimensionError("coupling matrix does not match qubit count");
  }
  if (drive_target_qubit != 0) throw ConfigError("the drive acts on qubit 0");
}

DrivenTfim make_driven_tfim(const DrivenTfimSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_qubits;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  DrivenTfim model{ComplexMatrix::Zero(dim, dim), embed(pauli_y(), spec.drive_target_qubit, n)};
  const ComplexMatrix sp = sigma_plus();
  const ComplexMatrix sm = sigma_minus();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      // Only the upper triangle is read; J is symmetric by construction.
      const double jik = spec.couplings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (jik == 0.0) continue;
      model.hopping += jik * (embed(sp, i, n) * embed(sm, k, n) + embed(sm, i, n) * embed(sp, k, n));
    }
  }
  return model;
}

ComplexMatrix build_driven_tfim(const DrivenTfimSpec& spec, double s) { return make_driven_tfim(spec).at(s); }

double spectral_radius(const ComplexMatrix& hamiltonian) {
  require_hermitian(hamiltonian, 1e-10, "Hamiltonian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hamiltonian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace qrc
