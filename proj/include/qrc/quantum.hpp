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

// Dense density-matrix primitives for small qubit registers.
//
// Qubit 0 is the most significant tensor factor: basis index b encodes
// qubit q in bit (n_qubits - 1 - q). The input qubit is always qubit 0, so
// "trace out the first qubit" contracts the leading 2-dimensional factor.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace qrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace tolerance {
inline constexpr double kTrace = 1e-10;
inline constexpr double kHermitian = 1e-10;
inline constexpr double kMinEigenvalue = -1e-9;
inline constexpr double kUnitary = 1e-10;
}  // namespace tolerance

/// Worst-case deviations of a matrix from the density-matrix invariants.
struct InvariantDefects {
  double trace = 0.0;        // |Tr rho - 1|
  double hermiticity = 0.0;  // max |rho - rho^dagger|
  double min_eigenvalue = 0.0;

  bool ok() const noexcept {
    return trace <= tolerance::kTrace && hermiticity <= tolerance::kHermitian &&
           min_eigenvalue >= tolerance::kMinEigenvalue;
  }
  /// Componentwise worst of two reports.
  void merge(const InvariantDefects& other) noexcept;
};

InvariantDefects measure_defects(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);

struct QubitLayout {
  std::size_t n_qubits = 1;
  std::size_t input_qubit_index = 0;

  std::size_t dim() const noexcept { return std::size_t{1} << n_qubits; }
  void validate() const;
};

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
/// Construction throws InvariantError rather than clipping.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  /// |0...0><0...0| on n qubits.
  static DensityMatrix ground(std::size_t n_qubits);
  static DensityMatrix maximally_mixed(std::size_t n_qubits);
  static DensityMatrix from_pure(const Eigen::VectorXcd& psi);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  std::size_t n_qubits() const noexcept;

 private:
  ComplexMatrix m_;
};

// Single-qubit operators in the (|0>, |1>) basis. sigma_minus = |0><1|
// lowers the excitation |1> to the ground state |0>.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix sigma_plus();
ComplexMatrix sigma_minus();
ComplexMatrix identity(std::size_t dim);

/// op acting on `qubit` of an n-qubit register (identity elsewhere).
ComplexMatrix embed(const ComplexMatrix& op, std::size_t qubit, std::size_t n_qubits);

/// Diagonal of sigma_z on `qubit` as a real vector of +-1.
RealVector sigma_z_diagonal(std::size_t qubit, std::size_t n_qubits);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Trace over qubit 0. Throws DimensionError unless dim is a power of two >= 4.
ComplexMatrix partial_trace_first(const ComplexMatrix& rho);
DensityMatrix partial_trace_first(const DensityMatrix& rho, const QubitLayout& layout);

/// Single-qubit state with <sigma_z> = u; throws RangeError for |u| > 1.
DensityMatrix encode_input(double u);
/// Unvalidated 2x2 matrix of encode_input, for hot loops.
Eigen::Matrix2cd encode_input_matrix(double u);

/// U (encode_input(u) (x) Tr_1[rho]) U^dagger.
DensityMatrix inject_and_evolve(const DensityMatrix& rho, double u, const ComplexMatrix& unitary,
                                const QubitLayout& layout);

/// Tr[rho obs]; throws NotHermitianError for a non-Hermitian observable.
double expectation(const DensityMatrix& rho, const ComplexMatrix& obs);

/// Eigen-decomposition of a Hermitian matrix, reusable for exp(-iHt) at many t.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const ComplexMatrix& hamiltonian);

  ComplexMatrix unitary(double t) const;
  const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
  const ComplexMatrix& eigenvectors() const noexcept { return eigenvectors_; }

 private:
  RealVector eigenvalues_;
  ComplexMatrix eigenvectors_;
};

/// exp(-iHt) by Hermitian eigen-decomposition.
ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& hamiltonian, double t);

void require_hermitian(const ComplexMatrix& m, double tol, const char* what);
void require_unitary(const ComplexMatrix& u, double tol);

}  // namespace qrc
