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

#include "qrc/quantum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "qrc/errors.hpp"

namespace qrc {

void InvariantDefects::merge(const InvariantDefects& other) noexcept {
  trace = std::max(trace, other.trace);
  hermiticity = std::max(hermiticity, other.hermiticity);
  min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

InvariantDefects measure_defects(const ComplexMatrix& m) {
  InvariantDefects d;
  d.trace = std::abs(m.trace() - Complex(1.0, 0.0));
  d.hermiticity = hermiticity_defect(m);
  // Eigenvalues of the Hermitian part; the anti-Hermitian part is reported above.
  const ComplexMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

void QubitLayout::validate() const {
  if (n_qubits < 1 || n_qubits > 16) throw DimensionError("qubit count must be in [1, 16]");
  if (input_qubit_index >= n_qubits) throw DimensionError("input qubit index out of range");
  if (input_qubit_index != 0) throw DimensionError("inputs are injected into qubit 0 only");
}

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || !is_power_of_two(m_.rows())) {
    throw DimensionError("density matrix must be square with power-of-two dimension");
  }
  const InvariantDefects d = measure_defects(m_);
  if (!d.ok()) {
    std::ostringstream os;
    os << "density matrix invariants violated: trace defect " << d.trace << ", hermiticity defect "
       << d.hermiticity << ", min eigenvalue " << d.min_eigenvalue;
    throw InvariantError(os.str());
  }
}

std::size_t DensityMatrix::n_qubits() const noexcept {
  return static_cast<std::size_t>(std::countr_zero(static_cast<unsigned long long>(m_.rows())));
}

DensityMatrix DensityMatrix::ground(std::size_t n_qubits) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(0, 0) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_qubits) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::from_pure(const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw ValueError("zero state vector");
  const Eigen::VectorXcd v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix sigma_plus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

ComplexMatrix sigma_minus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

ComplexMatrix identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return ComplexMatrix::Identity(d, d);
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index rb = b.rows();
  const Eigen::Index cb = b.cols();
  ComplexMatrix out(a.rows() * rb, a.cols() * cb);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix embed(const ComplexMatrix& op, std::size_t qubit, std::size_t n_qubits) {
  if (qubit >= n_qubits) throw DimensionError("qubit index out of range");
  if (op.rows() != 2 || op.cols() != 2) throw DimensionError("embed expects a single-qubit operator");
  const ComplexMatrix left = identity(std::size_t{1} << qubit);
  const ComplexMatrix right = identity(std::size_t{1} << (n_qubits - 1 - qubit));
  return tensor_product(tensor_product(left, op), right);
}

RealVector sigma_z_diagonal(std::size_t qubit, std::size_t n_qubits) {
  if (qubit >= n_qubits) throw DimensionError("qubit index out of range");
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t mask = std::size_t{1} << (n_qubits - 1 - qubit);
  RealVector z(static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) z(static_cast<Eigen::Index>(b)) = (b & mask) ? -1.0 : 1.0;
  return z;
}

ComplexMatrix partial_trace_first(const ComplexMatrix& rho) {
  const Eigen::Index dim = rho.rows();
  if (rho.cols() != dim || dim < 4 || !is_power_of_two(dim)) {
    throw DimensionError("partial trace over qubit 0 needs a square power-of-two matrix of dim >= 4");
  }
  const Eigen::Index half = dim / 2;
  return rho.topLeftCorner(half, half) + rho.bottomRightCorner(half, half);
}

DensityMatrix partial_trace_first(const DensityMatrix& rho, const QubitLayout& layout) {
  layout.validate();
  if (rho.dim() != layout.dim()) throw DimensionError("density matrix does not match the qubit layout");
  return DensityMatrix(partial_trace_first(rho.matrix()));
}

Eigen::Matrix2cd encode_input_matrix(double u) {
  if (!(std::abs(u) <= 1.0)) {
    std::ostringstream os;
    os << "input " << u << " outside [-1, 1]";
    throw RangeError(os.str());
  }
  const double a = std::sqrt(0.5 * (1.0 + u));
  const double b = std::sqrt(0.5 * (1.0 - u));
  Eigen::Matrix2cd m;
  m << a * a, a * b, a * b, b * b;
  return m;
}

DensityMatrix encode_input(double u) { return DensityMatrix(ComplexMatrix(encode_input_matrix(u))); }

DensityMatrix inject_and_evolve(const DensityMatrix& rho, double u, const ComplexMatrix& unitary,
                                const QubitLayout& layout) {
  layout.validate();
  if (rho.dim() != layout.dim() || unitary.rows() != rho.matrix().rows() ||
      unitary.cols() != rho.matrix().cols()) {
    throw DimensionError("state, unitary and layout dimensions disagree");
  }
  require_unitary(unitary, tolerance::kUnitary);
  const ComplexMatrix injected =
      layout.n_qubits == 1 ? ComplexMatrix(encode_input_matrix(u))
                           : tensor_product(encode_input_matrix(u), partial_trace_first(rho.matrix()));
  return DensityMatrix(unitary * injected * unitary.adjoint());
}

void require_hermitian(const ComplexMatrix& m, double tol, const char* what) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(what) + " must be square");
  const double defect = hermiticity_defect(m);
  if (defect > tol) {
    std::ostringstream os;
    os << what << " is not Hermitian (defect " << defect << ")";
    throw NotHermitianError(os.str());
  }
}

void require_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) throw DimensionError("unitary must be square");
  const double defect = (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (defect > tol) {
    std::ostringstream os;
    os << "matrix is not unitary (defect " << defect << ")";
    throw ValueError(os.str());
  }
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& obs) {
  require_hermitian(obs, tolerance::kHermitian, "observable");
  if (obs.rows() != rho.matrix().rows()) throw DimensionError("observable dimension mismatch");
  // Tr[rho obs] = sum_ab rho_ab obs_ba
  const Complex value = (rho.matrix().array() * obs.transpose().array()).sum();
  if (std::abs(value.imag()) > 1e-10) {
    throw InvariantError("expectation value has a non-negligible imaginary part");
  }
  return value.real();
}

SpectralPropagator::SpectralPropagator(const ComplexMatrix& hamiltonian) {
  require_hermitian(hamiltonian, 1e-10, "Hamiltonian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (hamiltonian + hamiltonian.adjoint()));
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

ComplexMatrix SpectralPropagator::unitary(double t) const {
  Eigen::VectorXcd phases(eigenvalues_.size());
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -eigenvalues_(k) * t));
  }
  ComplexMatrix u = eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
  // One Newton-Schulz step towards the nearest unitary. The eigensolver's
  // vectors are orthonormal only to ~1e-15, and that bias would otherwise
  // drift the trace linearly over long runs.
  const auto dim = u.rows();
  u = 0.5 * u * (3.0 * ComplexMatrix::Identity(dim, dim) - u.adjoint() * u);
  return u;
}

ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& hamiltonian, double t) {
  return SpectralPropagator(hamiltonian).unitary(t);
}

}  // namespace qrc
