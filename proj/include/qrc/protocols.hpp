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

// Reservoir drivers for the four input/measurement protocols. Every runner
// returns the noiseless multiplexed readout trace: row k holds <sigma_z^(i)>
// at tau_m = m T / N_V (m = 1..N_V) during input cycle k, in column
// (m - 1) * N_S + i.

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "qrc/hamiltonians.hpp"
#include "qrc/quantum.hpp"

namespace qrc {

enum class ProtocolKind { kFrp, kMrp, kWmp, kDsp };

std::string to_string(ProtocolKind kind);
ProtocolKind protocol_kind_from_string(const std::string& name);

struct ClockConfig {
  double clock_cycle = 50.0;
  std::size_t multiplexing = 30;

  void validate() const;
};

struct ProtocolConfig {
  ProtocolKind kind = ProtocolKind::kFrp;
  std::size_t reset_length = 6;         // MRP
  double measurement_strength = 0.109;  // WMP, in [0, pi/2]
  double decay_rate = 0.5;              // DSP, per unit time
  ClockConfig clock;
  std::size_t washout = 1000;
  // WMP: apply the back-action mask after every sub-readout instead of once per cycle.
  bool backaction_per_subreadout = false;
  // DSP: nominal RK4 steps per clock cycle (refined automatically when stiff).
  std::size_t dsp_steps_per_cycle = 200;

  void validate() const;

  static ProtocolConfig frp();
  static ProtocolConfig mrp(std::size_t reset_length);
  static ProtocolConfig wmp(double theta);
  static ProtocolConfig dsp(double gamma);
};

struct ReadoutTrace {
  RealMatrix values;  // rows = input steps after washout, cols = N_S * N_V

  std::size_t n_steps() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

struct RunOptions {
  /// Starting state; |0...0><0...0| when empty. Ignored by MRP.
  std::optional<DensityMatrix> initial_state;
  /// Called with the state at the end of every input cycle (washout included).
  std::function<void(std::size_t step, const ComplexMatrix& state)> observer;
};

/// Element-wise damping mask M = [[1, cos t], [cos t, 1]]^{(x) n}.
RealMatrix backaction_matrix(double theta, std::size_t n_qubits);

ReadoutTrace run_frp(const ComplexMatrix& hamiltonian, const ProtocolConfig& config,
                     std::span<const double> inputs, const RunOptions& options = {});
ReadoutTrace run_mrp(const ComplexMatrix& hamiltonian, const ProtocolConfig& config,
                     std::span<const double> inputs, const RunOptions& options = {});
ReadoutTrace run_wmp(const ComplexMatrix& hamiltonian, const ProtocolConfig& config,
                     std::span<const double> inputs, const RunOptions& options = {});

/// -i[H, rho] + gamma sum_i (s-_i rho s+_i - 1/2 {s+_i s-_i, rho}).
ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& hamiltonian, double gamma);

/// Column-stacking Liouvillian: vec(lindblad_rhs(rho)) = L vec(rho).
ComplexMatrix liouvillian(const ComplexMatrix& hamiltonian, double gamma);

/// RK4 steps used per readout interval for a given drive.
std::size_t dsp_substeps(const DrivenTfim& model, const ProtocolConfig& config, std::size_t n_qubits);

/// Drive amplitude for input u in [-1, 1]: s = (1 + u) / 2, a non-negative
/// laser amplitude. A drive symmetric in u would make every sigma_z readout
/// an even function of the inputs.
double drive_amplitude(double u);

ReadoutTrace run_dsp(const DrivenTfimSpec& spec, const ProtocolConfig& config, std::span<const double> inputs,
                     const RunOptions& options = {});

}  // namespace qrc
