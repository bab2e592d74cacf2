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

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qrc/errors.hpp"
#include "qrc/hamiltonians.hpp"

using namespace qrc;
using namespace qrc::testing;

TEST_CASE("sample_couplings") {
  SUBCASE("degenerate interval") {
    TfimSpec spec;
    spec.coupling_low = spec.coupling_high = 0.5;
    const Couplings j = sample_couplings(spec);
    for (Eigen::Index a = 0; a < 4; ++a)
      for (Eigen::Index b = a + 1; b < 4; ++b) CHECK(j(a, b) == 0.5);
  }
  SUBCASE("seeded reproducibility") {
    TfimSpec spec;
    spec.seed = 99;
    CHECK(max_abs(sample_couplings(spec) - sample_couplings(spec)) == 0.0);
    TfimSpec other = spec;
    other.seed = 100;
    CHECK(max_abs(sample_couplings(spec) - sample_couplings(other)) > 0.0);
  }
  SUBCASE("upper triangular with zero diagonal") {
    TfimSpec spec;
    spec.seed = 3;
    const Couplings j = sample_couplings(spec);
    for (Eigen::Index a = 0; a < 4; ++a)
      for (Eigen::Index b = 0; b <= a; ++b) CHECK(j(a, b) == 0.0);
  }
  SUBCASE("uniform statistics over 10^4 draws") {
    TfimSpec spec;
    spec.n_qubits = 2;  // one coupling per sample
    Rng rng(17);
    double sum = 0.0;
    double lo = 1.0, hi = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double v = sample_couplings(spec, rng)(0, 1);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(std::abs(sum / n - 0.5) < 0.02);
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
  }
  SUBCASE("invalid spec") {
    TfimSpec spec;
    spec.coupling_low = 1.0;
    spec.coupling_high = 0.0;
    CHECK_THROWS_AS(sample_couplings(spec), ConfigError);
  }
}

TEST_CASE("build_tfim") {
  SUBCASE("single site, h = 2, no normalization") {
    TfimSpec spec;
    spec.n_qubits = 1;
    spec.field_strength = 2.0;
    spec.normalize_spectral_radius = false;
    const ComplexMatrix h = build_tfim(spec, Couplings::Zero(1, 1));
    CHECK(max_abs(h - pauli_z()) < 1e-15);
  }
  SUBCASE("two sites, h = 0, J = 1") {
    TfimSpec spec;
    spec.n_qubits = 2;
    spec.field_strength = 0.0;
    spec.normalize_spectral_radius = false;
    Couplings j = Couplings::Zero(2, 2);
    j(0, 1) = 1.0;
    const ComplexMatrix h = build_tfim(spec, j);
    CHECK(max_abs(h - tensor_product(pauli_x(), pauli_x())) < 1e-15);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
    CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));
  }
  SUBCASE("explicit operator sum for random couplings") {
    TfimSpec spec;
    spec.n_qubits = 3;
    spec.field_strength = 0.7;
    spec.normalize_spectral_radius = false;
    spec.seed = 5;
    const Couplings j = sample_couplings(spec);
    ComplexMatrix expected = ComplexMatrix::Zero(8, 8);
    for (std::size_t i = 0; i < 3; ++i) expected += 0.5 * 0.7 * embed(pauli_z(), i, 3);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b)
        expected += j(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * embed(pauli_x(), a, 3) *
                    embed(pauli_x(), b, 3);
    CHECK(max_abs(build_tfim(spec, j) - expected) < 1e-14);
  }
  SUBCASE("normalized spectral radius and Hermiticity over many seeds") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      TfimSpec spec;
      spec.seed = seed;
      const ComplexMatrix h = build_tfim(spec, sample_couplings(spec));
      CHECK(hermiticity_defect(h) <= 1e-12);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
      CHECK(std::abs(es.eigenvalues().cwiseAbs().maxCoeff() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("build_driven_tfim") {
  DrivenTfimSpec spec;
  spec.n_qubits = 4;
  TfimSpec t;
  t.seed = 12;
  spec.couplings = sample_couplings(t);

  SUBCASE("s = 0 conserves the excitation number") {
    const ComplexMatrix h = build_driven_tfim(spec, 0.0);
    ComplexMatrix number = ComplexMatrix::Zero(16, 16);
    for (std::size_t q = 0; q < 4; ++q) number += embed(sigma_plus() * sigma_minus(), q, 4);
    CHECK(max_abs(h * number - number * h) < 1e-14);
  }
  SUBCASE("single qubit is a pure sigma_y drive") {
    DrivenTfimSpec one;
    one.n_qubits = 1;
    one.couplings = Couplings::Zero(1, 1);
    CHECK(max_abs(build_driven_tfim(one, 0.3) - 0.3 * pauli_y()) < 1e-16);
  }
  SUBCASE("Hermitian and linear in s") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const double s1 = rng.uniform(-2, 2), s2 = rng.uniform(-2, 2);
      const ComplexMatrix h1 = build_driven_tfim(spec, s1), h2 = build_driven_tfim(spec, s2);
      CHECK(hermiticity_defect(h1) <= 1e-12);
      CHECK(max_abs(h1 - h2 - (s1 - s2) * embed(pauli_y(), 0, 4)) < 1e-14);
    }
  }
  SUBCASE("hopping matches the raising/lowering sum") {
    ComplexMatrix expected = ComplexMatrix::Zero(16, 16);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = a + 1; b < 4; ++b) {
        const ComplexMatrix hop = embed(sigma_plus(), a, 4) * embed(sigma_minus(), b, 4);
        expected += spec.couplings(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                    (hop + ComplexMatrix(hop.adjoint()));
      }
    CHECK(max_abs(make_driven_tfim(spec).hopping - expected) < 1e-15);
  }
}

TEST_CASE("spectral_radius") {
  CHECK(spectral_radius(pauli_z()) == doctest::Approx(1.0));
  CHECK(spectral_radius(ComplexMatrix::Zero(4, 4)) == 0.0);
  CHECK(spectral_radius(3.0 * tensor_product(pauli_x(), pauli_x())) == doctest::Approx(3.0));
  CHECK_THROWS_AS(spectral_radius(sigma_plus()), NotHermitianError);
}

TEST_CASE("zero Hamiltonian cannot be normalized") {
  TfimSpec spec;
  spec.field_strength = 0.0;
  spec.coupling_low = spec.coupling_high = 0.0;
  CHECK_THROWS_AS(build_tfim(spec, sample_couplings(spec)), ValueError);
}
