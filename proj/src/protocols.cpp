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

#include "qrc/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qrc/errors.hpp"

namespace qrc {

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kFrp: return "FRP";
    case ProtocolKind::kMrp: return "MRP";
    case ProtocolKind::kWmp: return "WMP";
    case ProtocolKind::kDsp: return "DSP";
  }
  return "?";
}

ProtocolKind protocol_kind_from_string(const std::string& name) {
  if (name == "FRP" || name == "frp") return ProtocolKind::kFrp;
  if (name == "MRP" || name == "mrp") return ProtocolKind::kMrp;
  if (name == "WMP" || name == "wmp") return ProtocolKind::kWmp;
  if (name == "DSP" || name == "dsp") return ProtocolKind::kDsp;
  throw ConfigError("unknown protocol kind '" + name + "'");
}

void ClockConfig::validate() const {
  if (!(clock_cycle > 0.0) || !std::isfinite(clock_cycle)) throw ConfigError("clock cycle must be positive");
  if (multiplexing < 1) throw ConfigError("multiplexing must be at least 1");
}

void ProtocolConfig::validate() const {
  clock.validate();
  switch (kind) {
    case ProtocolKind::kMrp:
      if (reset_length < 1) throw ConfigError("reset length must be at least 1");
      break;
    case ProtocolKind::kWmp:
      if (!(measurement_strength >= 0.0 && measurement_strength <= std::numbers::pi / 2)) {
        throw RangeError("measurement strength must lie in [0, pi/2]");
      }
      break;
    case ProtocolKind::kDsp:
      if (!(decay_rate >= 0.0) || !std::isfinite(decay_rate)) throw RangeError("decay rate must be >= 0");
      if (dsp_steps_per_cycle < 1) throw ConfigError("dsp_steps_per_cycle must be at least 1");
      break;
    case ProtocolKind::kFrp:
      break;
  }
}

ProtocolConfig ProtocolConfig::frp() { return ProtocolConfig{}; }

ProtocolConfig ProtocolConfig::mrp(std::size_t reset_length) {
  ProtocolConfig c;
  c.kind = ProtocolKind::kMrp;
  c.reset_length = reset_length;
  c.washout = 0;
  return c;
}

ProtocolConfig ProtocolConfig::wmp(double theta) {
  ProtocolConfig c;
  c.kind = ProtocolKind::kWmp;
  c.measurement_strength = theta;
  return c;
}

ProtocolConfig ProtocolConfig::dsp(double gamma) {
  ProtocolConfig c;
  c.kind = ProtocolKind::kDsp;
  c.decay_rate = gamma;
  c.clock = ClockConfig{1.0, 10};
  return c;
}

RealMatrix backaction_matrix(double theta, std::size_t n_qubits) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) throw RangeError("measurement strength must lie in [0, pi/2]");
  if (n_qubits < 1 || n_qubits > 12) throw DimensionError("qubit count must be in [1, 12]");
  const std::size_t dim = std::size_t{1} << n_qubits;
  const double c = std::cos(theta);
  RealVector powers(static_cast<Eigen::Index>(n_qubits + 1));
  powers(0) = 1.0;
  for (std::size_t k = 1; k <= n_qubits; ++k) powers(static_cast<Eigen::Index>(k)) = powers(static_cast<Eigen::Index>(k - 1)) * c;
  RealMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) {
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = powers(std::popcount(a ^ b));
    }
  }
  return m;
}

namespace {

void check_inputs(std::span<const double> inputs) {
  if (inputs.empty()) throw ValueError("input sequence is empty");
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (!(std::abs(inputs[k]) <= 1.0)) {
      std::ostringstream os;
      os << "input " << inputs[k] << " at step " << k << " outside [-1, 1]";
      throw RangeError(os.str());
    }
  }
}

std::size_t qubits_of(const ComplexMatrix& h) {
  const Eigen::Index dim = h.rows();
  if (dim != h.cols() || dim < 2 || (dim & (dim - 1)) != 0) {
    throw DimensionError("Hamiltonian must be square with power-of-two dimension");
  }
  return static_cast<std::size_t>(std::countr_zero(static_cast<unsigned long long>(dim)));
}

ComplexMatrix initial_state(const RunOptions& options, std::size_t n_qubits) {
  if (!options.initial_state) return DensityMatrix::ground(n_qubits).matrix();
  if (options.initial_state->n_qubits() != n_qubits) throw DimensionError("initial state has the wrong qubit count");
  return options.initial_state->matrix();
}

ReadoutTrace make_trace(std::size_t n_steps, const ProtocolConfig& config, std::size_t n_qubits) {
  if (config.washout >= n_steps) {
    std::ostringstream os;
    os << "washout (" << config.washout << ") leaves no rows of a " << n_steps << "-step input";
    throw ValueError(os.str());
  }
  ReadoutTrace t;
  t.values.resize(static_cast<Eigen::Index>(n_steps - config.washout),
                  static_cast<Eigen::Index>(n_qubits * config.clock.multiplexing));
  return t;
}

// Unitary-evolution reservoir shared by FRP, MRP and WMP. Readouts of the
// cycle are linear functionals of the injected state (Heisenberg picture):
// <sigma_z^(i)>(tau_m) = Tr[rho_in U_m^dagger Z_i U_m].
class UnitaryReservoir {
 public:
  UnitaryReservoir(const ComplexMatrix& hamiltonian, const ClockConfig& clock)
      : n_qubits_(qubits_of(hamiltonian)), dim_(hamiltonian.rows()) {
    clock.validate();
    const SpectralPropagator prop(hamiltonian);
    cycle_ = prop.unitary(clock.clock_cycle);
    step_ = prop.unitary(clock.clock_cycle / static_cast<double>(clock.multiplexing));
    const auto n_nodes = static_cast<Eigen::Index>(n_qubits_ * clock.multiplexing);
    const Eigen::Index d2 = dim_ * dim_;
    functional_.resize(n_nodes, 2 * d2);
    for (std::size_t m = 0; m < clock.multiplexing; ++m) {
      const double tau = clock.clock_cycle * static_cast<double>(m + 1) / static_cast<double>(clock.multiplexing);
      const ComplexMatrix u = prop.unitary(tau);
      for (std::size_t q = 0; q < n_qubits_; ++q) {
        const RealVector z = sigma_z_diagonal(q, n_qubits_);
        const ComplexMatrix obs = u.adjoint() * z.cast<Complex>().asDiagonal() * u;
        const auto row = static_cast<Eigen::Index>(m * n_qubits_ + q);
        // x = sum_ab Re(rho_ab obs_ba); vec index of rho_ab is a + b * dim.
        for (Eigen::Index b = 0; b < dim_; ++b) {
          for (Eigen::Index a = 0; a < dim_; ++a) {
            functional_(row, a + b * dim_) = obs(b, a).real();
            functional_(row, d2 + a + b * dim_) = -obs(b, a).imag();
          }
        }
      }
    }
    injected_.resize(dim_, dim_);
    scratch_.resize(dim_, dim_);
    stacked_.resize(2 * d2);
    for (std::size_t q = 0; q < n_qubits_; ++q) z_.push_back(sigma_z_diagonal(q, n_qubits_));
  }

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  Eigen::Index dim() const noexcept { return dim_; }
  const ComplexMatrix& step_unitary() const noexcept { return step_; }

  // rho_in = encode(u) (x) Tr_1[rho]
  const ComplexMatrix& inject(const ComplexMatrix& rho, double u) {
    const Eigen::Matrix2cd e = encode_input_matrix(u);
    if (dim_ == 2) {
      injected_ = e;
      return injected_;
    }
    const Eigen::Index half = dim_ / 2;
    scratch_.topLeftCorner(half, half) = rho.topLeftCorner(half, half) + rho.bottomRightCorner(half, half);
    const auto reduced = scratch_.topLeftCorner(half, half);
    injected_.topLeftCorner(half, half) = e(0, 0) * reduced;
    injected_.topRightCorner(half, half) = e(0, 1) * reduced;
    injected_.bottomLeftCorner(half, half) = e(1, 0) * reduced;
    injected_.bottomRightCorner(half, half) = e(1, 1) * reduced;
    return injected_;
  }

  template <typename Row>
  void read(const ComplexMatrix& rho_in, Row&& row) {
    const Eigen::Index d2 = dim_ * dim_;
    const Eigen::Map<const Eigen::VectorXcd> v(rho_in.data(), d2);
    stacked_.head(d2) = v.real();
    stacked_.tail(d2) = v.imag();
    row = (functional_ * stacked_).transpose();
  }

  // rho <- U_R rho_in U_R^dagger
  void evolve(const ComplexMatrix& rho_in, ComplexMatrix& out) {
    scratch_.noalias() = cycle_ * rho_in;
    out.noalias() = scratch_ * cycle_.adjoint();
  }

  void evolve_step(ComplexMatrix& rho) {
    scratch_.noalias() = step_ * rho;
    rho.noalias() = scratch_ * step_.adjoint();
  }

  double sigma_z(const ComplexMatrix& rho, std::size_t q) const {
    return (z_[q].array() * rho.diagonal().real().array()).sum();
  }

 private:
  std::size_t n_qubits_;
  Eigen::Index dim_;
  ComplexMatrix cycle_;
  ComplexMatrix step_;
  RealMatrix functional_;
  ComplexMatrix injected_;
  ComplexMatrix scratch_;
  RealVector stacked_;
  std::vector<RealVector> z_;
};

void require_kind(const ProtocolConfig& config, ProtocolKind kind) {
  if (config.kind != kind) throw ConfigError("runner for " + to_string(kind) + " called with " + to_string(config.kind));
}

// Forward pass used by FRP and (once-per-cycle) WMP.
ReadoutTrace run_forward(const ComplexMatrix& hamiltonian, const ProtocolConfig& config, std::span<const double> inputs,
                         const RunOptions& options, const RealMatrix* mask) {
  config.validate();
  check_inputs(inputs);
  UnitaryReservoir res(hamiltonian, config.clock);
  ReadoutTrace trace = make_trace(inputs.size(), config, res.n_qubits());
  ComplexMatrix rho = initial_state(options, res.n_qubits());
  ComplexMatrix next(res.dim(), res.dim());
  ComplexMatrix cmask;
  if (mask) cmask = mask->cast<Complex>();
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const ComplexMatrix& injected = res.inject(rho, inputs[k]);
    if (k >= config.washout) res.read(injected, trace.values.row(static_cast<Eigen::Index>(k - config.washout)));
    res.evolve(injected, next);
    if (mask) next.array() *= cmask.array();
    rho.swap(next);
    if (options.observer) options.observer(k, rho);
  }
  return trace;
}

}  // namespace

ReadoutTrace run_frp(const ComplexMatrix& hamiltonian, const ProtocolConfig& config, std::span<const double> inputs,
                     const RunOptions& options) {
  require_kind(config, ProtocolKind::kFrp);
  return run_forward(hamiltonian, config, inputs, options, nullptr);
}

ReadoutTrace run_mrp(const ComplexMatrix& hamiltonian, const ProtocolConfig& config, std::span<const double> inputs,
                     const RunOptions& options) {
  require_kind(config, ProtocolKind::kMrp);
  config.validate();
  check_inputs(inputs);
  UnitaryReservoir res(hamiltonian, config.clock);
  ReadoutTrace trace = make_trace(inputs.size(), config, res.n_qubits());
  const ComplexMatrix ground = DensityMatrix::ground(res.n_qubits()).matrix();
  ComplexMatrix rho(res.dim(), res.dim());
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    if (n < config.washout && !options.observer) continue;
    // Window {u_{n-r+1}, ..., u_n}, truncated to the available prefix.
    const std::size_t first = n + 1 >= config.reset_length ? n + 1 - config.reset_length : 0;
    rho = ground;
    for (std::size_t j = first; j <= n; ++j) {
      const ComplexMatrix& injected = res.inject(rho, inputs[j]);
      if (j == n) {
        if (n >= config.washout) res.read(injected, trace.values.row(static_cast<Eigen::Index>(n - config.washout)));
        if (!options.observer) break;
      }
      res.evolve(injected, rho);
    }
    if (options.observer) options.observer(n, rho);
  }
  return trace;
}

ReadoutTrace run_wmp(const ComplexMatrix& hamiltonian, const ProtocolConfig& config, std::span<const double> inputs,
                     const RunOptions& options) {
  require_kind(config, ProtocolKind::kWmp);
  config.validate();
  const std::size_t n_qubits = qubits_of(hamiltonian);
  const RealMatrix mask = backaction_matrix(config.measurement_strength, n_qubits);
  // At theta = 0 the mask is all ones and the cadence is irrelevant; the
  // forward path then reproduces FRP exactly instead of up to rounding.
  if (!config.backaction_per_subreadout || config.measurement_strength == 0.0) {
    return run_forward(hamiltonian, config, inputs, options, &mask);
  }

  check_inputs(inputs);
  UnitaryReservoir res(hamiltonian, config.clock);
  ReadoutTrace trace = make_trace(inputs.size(), config, n_qubits);
  const ComplexMatrix cmask = mask.cast<Complex>();
  ComplexMatrix rho = initial_state(options, n_qubits);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    rho = res.inject(rho, inputs[k]);
    for (std::size_t m = 0; m < config.clock.multiplexing; ++m) {
      res.evolve_step(rho);
      rho.array() *= cmask.array();
      if (k < config.washout) continue;
      for (std::size_t q = 0; q < n_qubits; ++q) {
        trace.values(static_cast<Eigen::Index>(k - config.washout), static_cast<Eigen::Index>(m * n_qubits + q)) =
            res.sigma_z(rho, q);
      }
    }
    if (options.observer) options.observer(k, rho);
  }
  return trace;
}

namespace {

// Dissipator for uniform sigma_minus decay on every qubit, applied without
// forming the jump operators: with m_i the bit of qubit i,
//   (s-_i rho s+_i)[a, b] = rho[a | m_i, b | m_i]  if bit i of a and b is 0,
//   1/2 sum_i {n_i, rho}[a, b] = (popcount(a) + popcount(b)) / 2 * rho[a, b].
class Dissipator {
 public:
  Dissipator(std::size_t n_qubits, double gamma) : gamma_(gamma) {
    const std::size_t dim = std::size_t{1} << n_qubits;
    half_count_.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) {
        half_count_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            0.5 * static_cast<double>(std::popcount(a) + std::popcount(b));
      }
    }
    // (s- rho s+)(a, b) = rho(a|m, b|m) for a, b with bit m clear; flat column-major offsets.
    for (std::size_t q = 0; q < n_qubits; ++q) {
      const std::size_t mask = std::size_t{1} << (n_qubits - 1 - q);
      for (std::size_t b = 0; b < dim; ++b) {
        if (b & mask) continue;
        for (std::size_t a = 0; a < dim; ++a) {
          if (a & mask) continue;
          jumps_.emplace_back(a + b * dim, (a | mask) + (b | mask) * dim);
        }
      }
    }
  }

  // out += D(rho)
  template <typename Mat>
  void add_to(const Mat& rho, Mat& out) const {
    if (gamma_ == 0.0) return;
    out.array() -= gamma_ * half_count_.array() * rho.array();
    const Complex* src = rho.data();
    Complex* dst = out.data();
    for (const auto& [d, s] : jumps_) dst[d] += gamma_ * src[s];
  }

 private:
  double gamma_;
  RealMatrix half_count_;
  std::vector<std::pair<std::size_t, std::size_t>> jumps_;
};

}  // namespace

ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& hamiltonian, double gamma) {
  if (!(gamma >= 0.0)) throw RangeError("decay rate must be >= 0");
  const std::size_t n = qubits_of(hamiltonian);
  if (rho.rows() != hamiltonian.rows() || rho.cols() != hamiltonian.cols()) {
    throw DimensionError("state and Hamiltonian dimensions disagree");
  }
  const Complex minus_i(0.0, -1.0);
  ComplexMatrix out = minus_i * (hamiltonian * rho - rho * hamiltonian);
  Dissipator(n, gamma).add_to(rho, out);
  return out;
}

ComplexMatrix liouvillian(const ComplexMatrix& hamiltonian, double gamma) {
  const std::size_t n = qubits_of(hamiltonian);
  const Eigen::Index dim = hamiltonian.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  const Complex minus_i(0.0, -1.0);
  // vec(A X B) = (B^T (x) A) vec(X)
  ComplexMatrix l = minus_i * (tensor_product(id, hamiltonian) - tensor_product(hamiltonian.transpose(), id));
  for (std::size_t q = 0; q < n; ++q) {
    const ComplexMatrix lower = embed(sigma_minus(), q, n);
    const ComplexMatrix raise = lower.adjoint();
    const ComplexMatrix number = raise * lower;
    l += gamma * (tensor_product(raise.transpose(), lower) -
                  0.5 * (tensor_product(id, number) + tensor_product(number.transpose(), id)));
  }
  return l;
}

std::size_t dsp_substeps(const DrivenTfim& model, const ProtocolConfig& config, std::size_t n_qubits) {
  config.validate();
  const std::size_t nv = config.clock.multiplexing;
  std::size_t sub = (config.dsp_steps_per_cycle + nv - 1) / nv;
  // Keep h * (N gamma + 2 ||H||) inside the RK4 stability region for |s| <= 1.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(model.hopping, Eigen::EigenvaluesOnly);
  const double h_norm = es.eigenvalues().cwiseAbs().maxCoeff() + 1.0;
  const double rate = static_cast<double>(n_qubits) * config.decay_rate + 2.0 * h_norm;
  const double interval = config.clock.clock_cycle / static_cast<double>(nv);
  constexpr double kStableProduct = 2.5;
  const auto needed = static_cast<std::size_t>(std::ceil(interval * rate / kStableProduct));
  return std::max(sub, needed);
}

double drive_amplitude(double u) {
  if (!(u >= -1.0 && u <= 1.0)) throw RangeError("input must lie in [-1, 1]");
  return 0.5 * (1.0 + u);
}

namespace {

// Fixed-step RK4 over each readout interval; Mat is a fixed-size matrix type
// for the common 4-qubit case and ComplexMatrix otherwise.
template <typename Mat>
void integrate_dsp(const DrivenTfim& model, const ProtocolConfig& config, std::span<const double> inputs,
                   const RunOptions& options, std::size_t n, std::size_t sub, ReadoutTrace& trace) {
  const Eigen::Index dim = model.hopping.rows();
  const std::size_t nv = config.clock.multiplexing;
  const double h = config.clock.clock_cycle / static_cast<double>(nv * sub);
  const Dissipator dissipator(n, config.decay_rate);
  RealMatrix z(dim, static_cast<Eigen::Index>(n));
  for (std::size_t q = 0; q < n; ++q) z.col(static_cast<Eigen::Index>(q)) = sigma_z_diagonal(q, n);

  Mat rho = initial_state(options, n);
  Mat k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim), prod(dim, dim), ham(dim, dim);
  const Mat hopping = model.hopping;
  const Mat drive = model.drive;
  const Complex minus_i(0.0, -1.0);

  // States stay Hermitian, so rho H = (H rho)^dagger.
  auto rhs = [&](const Mat& r, Mat& out) {
    prod.noalias() = ham * r;
    out = minus_i * (prod - prod.adjoint());
    dissipator.add_to(r, out);
  };

  for (std::size_t k = 0; k < inputs.size(); ++k) {
    ham = hopping + drive_amplitude(inputs[k]) * drive;
    for (std::size_t m = 0; m < nv; ++m) {
      for (std::size_t s = 0; s < sub; ++s) {
        rhs(rho, k1);
        stage = rho + (0.5 * h) * k1;
        rhs(stage, k2);
        stage = rho + (0.5 * h) * k2;
        rhs(stage, k3);
        stage = rho + h * k3;
        rhs(stage, k4);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      if (k >= config.washout) {
        const RealVector pop = rho.diagonal().real();
        trace.values.row(static_cast<Eigen::Index>(k - config.washout))
            .segment(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(n)) = (z.transpose() * pop).transpose();
      }
    }
    const double trace_defect = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (!std::isfinite(trace_defect) || trace_defect > 1e-8) {
      std::ostringstream os;
      os << "Lindblad integration lost trace at step " << k << " (defect " << trace_defect << ")";
      throw IntegratorError(os.str());
    }
    if (options.observer) options.observer(k, ComplexMatrix(rho));
  }
}

}  // namespace

ReadoutTrace run_dsp(const DrivenTfimSpec& spec, const ProtocolConfig& config, std::span<const double> inputs,
                     const RunOptions& options) {
  require_kind(config, ProtocolKind::kDsp);
  config.validate();
  check_inputs(inputs);
  const DrivenTfim model = make_driven_tfim(spec);
  const std::size_t n = spec.n_qubits;
  const std::size_t sub = dsp_substeps(model, config, n);
  ReadoutTrace trace = make_trace(inputs.size(), config, n);
  if (n == 4) {
    integrate_dsp<Eigen::Matrix<Complex, 16, 16>>(model, config, inputs, options, n, sub, trace);
  } else {
    integrate_dsp<ComplexMatrix>(model, config, inputs, options, n, sub, trace);
  }
  return trace;
}

}  // namespace qrc
