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
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "qrc/errors.hpp"
#include "qrc/quantum.hpp"

using namespace qrc;
using namespace qrc::testing;

TEST_CASE("tensor_product") {
  SUBCASE("identities") { CHECK(max_abs(tensor_product(identity(2), identity(2)) - identity(4)) == 0.0); }
  SUBCASE("z (x) z is diag(1,-1,-1,1)") {
    const ComplexMatrix zz = tensor_product(pauli_z(), pauli_z());
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected.diagonal() << 1, -1, -1, 1;
    CHECK(max_abs(zz - expected) == 0.0);
  }
  SUBCASE("|0><0| (x) |1><1| has a single 1 at (1,1)") {
    ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    const ComplexMatrix t = tensor_product(p0, p1);
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(1, 1) = 1;
    CHECK(max_abs(t - expected) == 0.0);
  }
  SUBCASE("index formula on rectangular factors") {
    Rng rng(1);
    const ComplexMatrix a = random_complex(2, 3, rng), b = random_complex(3, 2, rng);
    const ComplexMatrix t = tensor_product(a, b);
    REQUIRE(t.rows() == 6);
    REQUIRE(t.cols() == 6);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 2; ++l) CHECK(std::abs(t(i * 3 + k, j * 2 + l) - a(i, j) * b(k, l)) < 1e-15);
  }
}

TEST_CASE("partial_trace_first") {
  const QubitLayout two{2, 0};
  SUBCASE("product ground state") {
    const DensityMatrix r = partial_trace_first(DensityMatrix::ground(2), two);
    CHECK(max_abs(r.matrix() - DensityMatrix::ground(1).matrix()) == 0.0);
  }
  SUBCASE("Bell state gives I/2") {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
    const DensityMatrix r = partial_trace_first(DensityMatrix::from_pure(psi), two);
    CHECK(max_abs(r.matrix() - 0.5 * identity(2)) < 1e-15);
  }
  SUBCASE("product of random states returns the second factor") {
    Rng rng(2);
    for (int n = 2; n <= 5; ++n) {
      const ComplexMatrix a = random_density(2, rng);
      const ComplexMatrix b = random_density(Eigen::Index{1} << (n - 1), rng);
      const ComplexMatrix ab = tensor_product(a, b);
      CHECK(max_abs(partial_trace_first(ab) - b) < 1e-14);
      CHECK(max_abs(partial_trace_first(ab) - brute_partial_trace_first(ab)) < 1e-15);
    }
  }
  SUBCASE("entangled random states agree with index contraction") {
    Rng rng(3);
    const ComplexMatrix rho = random_density(16, rng);
    CHECK(max_abs(partial_trace_first(rho) - brute_partial_trace_first(rho)) < 1e-15);
  }
  SUBCASE("linearity over convex combinations") {
    Rng rng(4);
    const ComplexMatrix r = random_density(8, rng), s = random_density(8, rng);
    const double a = 0.3;
    CHECK(max_abs(partial_trace_first(a * r + (1 - a) * s) -
                  (a * partial_trace_first(r) + (1 - a) * partial_trace_first(s))) < 1e-15);
  }
  SUBCASE("dimension errors") {
    CHECK_THROWS_AS(partial_trace_first(ComplexMatrix::Identity(2, 2)), DimensionError);
    CHECK_THROWS_AS(partial_trace_first(ComplexMatrix::Identity(6, 6)), DimensionError);
  }
}

TEST_CASE("DensityMatrix rejects invalid matrices") {
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(2, 2)), InvariantError);  // trace 2
  ComplexMatrix m = 0.5 * identity(2);
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{m}, InvariantError);  // not Hermitian
  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, InvariantError);  // negative eigenvalue
  CHECK_NOTHROW(DensityMatrix::maximally_mixed(3));
}

TEST_CASE("encode_input") {
  CHECK(max_abs(encode_input(1.0).matrix() - DensityMatrix::ground(1).matrix()) < 1e-16);
  ComplexMatrix one = ComplexMatrix::Zero(2, 2);
  one(1, 1) = 1;
  CHECK(max_abs(encode_input(-1.0).matrix() - one) < 1e-16);
  CHECK(max_abs(encode_input(0.0).matrix() - ComplexMatrix::Constant(2, 2, 0.5)) < 1e-15);
  CHECK(expectation(encode_input(0.0), pauli_z()) == doctest::Approx(0.0));
  for (double u : {-0.9, -0.3, 0.0, 0.37, 0.99}) CHECK(std::abs(expectation(encode_input(u), pauli_z()) - u) < 1e-15);
  CHECK_THROWS_AS(encode_input(1.0000001), RangeError);
  CHECK_THROWS_AS(encode_input(-2.0), RangeError);
  CHECK_THROWS_AS(encode_input(std::nan("")), RangeError);
}

TEST_CASE("inject_and_evolve") {
  const QubitLayout layout{3, 0};
  Rng rng(5);
  SUBCASE("identity evolution re-encodes the first qubit") {
    const DensityMatrix rho(random_density(8, rng));
    const DensityMatrix out = inject_and_evolve(rho, 0.4, identity(8), layout);
    const ComplexMatrix expected = tensor_product(encode_input(0.4).matrix(), partial_trace_first(rho.matrix()));
    CHECK(max_abs(out.matrix() - expected) < 1e-15);
  }
  SUBCASE("u = 1 on the ground state leaves it unchanged") {
    const DensityMatrix out = inject_and_evolve(DensityMatrix::ground(3), 1.0, identity(8), layout);
    CHECK(max_abs(out.matrix() - DensityMatrix::ground(3).matrix()) < 1e-16);
  }
  SUBCASE("random unitaries keep the state physical") {
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho(random_density(8, rng));
      const DensityMatrix out = inject_and_evolve(rho, rng.uniform(-1, 1), random_unitary(8, rng), layout);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(out.matrix());
      CHECK(es.eigenvalues().minCoeff() >= -1e-12);
      CHECK(std::abs(out.matrix().trace() - Complex(1.0)) < 1e-12);
      CHECK(hermiticity_defect(out.matrix()) < 1e-12);
    }
  }
  SUBCASE("readout of the injected qubit equals the input under identity") {
    const ComplexMatrix z0 = embed(pauli_z(), 0, 3);
    for (int trial = 0; trial < 50; ++trial) {
      const double u = rng.uniform(-1, 1);
      const DensityMatrix out = inject_and_evolve(DensityMatrix(random_density(8, rng)), u, identity(8), layout);
      CHECK(std::abs(expectation(out, z0) - u) < 1e-12);
    }
  }
  SUBCASE("non-unitary evolution is rejected") {
    CHECK_THROWS(inject_and_evolve(DensityMatrix::ground(3), 0.0, 2.0 * identity(8), layout));
  }
}

TEST_CASE("expectation") {
  CHECK(expectation(DensityMatrix::ground(1), pauli_z()) == doctest::Approx(1.0));
  CHECK(std::abs(expectation(DensityMatrix::maximally_mixed(1), pauli_z())) < 1e-16);
  CHECK(expectation(encode_input(0.37), pauli_z()) == doctest::Approx(0.37).epsilon(1e-14));
  CHECK_THROWS_AS(expectation(DensityMatrix::ground(1), sigma_plus()), NotHermitianError);
  CHECK_THROWS_AS(expectation(DensityMatrix::ground(1), identity(4)), DimensionError);
}

TEST_CASE("embed and sigma_z_diagonal use qubit 0 as the most significant factor") {
  const ComplexMatrix z0 = embed(pauli_z(), 0, 2);
  CHECK(max_abs(z0 - tensor_product(pauli_z(), identity(2))) == 0.0);
  const RealVector d = sigma_z_diagonal(1, 3);
  for (Eigen::Index a = 0; a < 8; ++a) CHECK(d(a) == (((a >> 1) & 1) ? -1.0 : 1.0));
  CHECK(max_abs(sigma_minus() - ComplexMatrix(sigma_plus().adjoint())) == 0.0);
  CHECK(sigma_minus()(0, 1) == Complex(1.0));
}

TEST_CASE("unitary_from_hamiltonian") {
  SUBCASE("sigma_z at t = pi is -I") {
    CHECK(max_abs(unitary_from_hamiltonian(pauli_z(), std::numbers::pi) + identity(2)) < 1e-15);
  }
  SUBCASE("t = 0 is the identity") {
    Rng rng(6);
    CHECK(max_abs(unitary_from_hamiltonian(random_hermitian(8, rng), 0.0) - identity(8)) < 1e-14);
  }
  SUBCASE("random 16x16 Hermitian at t = 50 matches independent exponentials") {
    Rng rng(7);
    const ComplexMatrix h = random_hermitian(16, rng);
    const ComplexMatrix u = unitary_from_hamiltonian(h, 50.0);
    // Pade scaling-and-squaring oracle.
    const ComplexMatrix pade = (Complex(0.0, -50.0) * h).exp();
    CHECK(max_abs(u - pade) < 1e-9);
    // Spectral oracle computed from a complex (non-Hermitian) eigensolver.
    Eigen::ComplexEigenSolver<ComplexMatrix> ces(h);
    const ComplexMatrix v = ces.eigenvectors();
    Eigen::VectorXcd phase(16);
    for (int i = 0; i < 16; ++i) phase(i) = std::exp(Complex(0.0, -50.0) * ces.eigenvalues()(i));
    CHECK(max_abs(u - v * phase.asDiagonal() * v.inverse()) < 1e-9);
    CHECK(max_abs(u.adjoint() * u - identity(16)) < 1e-12);
  }
  SUBCASE("group property") {
    Rng rng(8);
    const ComplexMatrix h = random_hermitian(16, rng);
    CHECK(max_abs(unitary_from_hamiltonian(h, 1.3) * unitary_from_hamiltonian(h, 2.1) - unitary_from_hamiltonian(h, 3.4)) <
          1e-9);
  }
  SUBCASE("non-Hermitian Hamiltonian is rejected") {
    CHECK_THROWS_AS(unitary_from_hamiltonian(sigma_plus(), 1.0), NotHermitianError);
  }
}

TEST_CASE("measure_defects reports each invariant") {
  const InvariantDefects d = measure_defects(DensityMatrix::ground(2).matrix());
  CHECK(d.ok());
  ComplexMatrix bad = DensityMatrix::ground(2).matrix();
  bad(0, 0) = 1.1;
  CHECK_FALSE(measure_defects(bad).ok());
  CHECK(measure_defects(bad).trace == doctest::Approx(0.1));
}
