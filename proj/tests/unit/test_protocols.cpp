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
#include "qrc/hamiltonians.hpp"
#include "qrc/protocols.hpp"

using namespace qrc;
using namespace qrc::testing;

namespace {

ComplexMatrix paper_tfim(std::uint64_t seed) {
  TfimSpec spec;
  spec.seed = seed;
  return build_tfim(spec, sample_couplings(spec));
}

std::vector<double> random_inputs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> u(n);
  for (double& x : u) x = rng.uniform(-1.0, 1.0);
  return u;
}

ProtocolConfig no_washout(ProtocolConfig c) {
  c.washout = 0;
  return c;
}

DrivenTfimSpec driven_spec(std::uint64_t seed) {
  TfimSpec t;
  t.seed = seed;
  return DrivenTfimSpec{4, sample_couplings(t), 0};
}

// Worst invariant defect over every recorded state of a run.
template <typename Run>
InvariantDefects defects_of(Run&& run) {
  InvariantDefects worst;
  RunOptions options;
  options.observer = [&](std::size_t, const ComplexMatrix& rho) { worst.merge(measure_defects(rho)); };
  run(options);
  return worst;
}

}  // namespace

TEST_CASE("FRP on a trivial single qubit reads back the inputs") {
  const auto u = random_inputs(50, 1);
  ProtocolConfig c = no_washout(ProtocolConfig::frp());
  c.clock = {1.0, 3};
  const ReadoutTrace t = run_frp(ComplexMatrix::Zero(2, 2), c, u);
  REQUIRE(t.n_nodes() == 3);
  for (std::size_t k = 0; k < u.size(); ++k) CHECK(std::abs(t.values(static_cast<Eigen::Index>(k), 2) - u[k]) < 1e-15);
}

TEST_CASE("FRP reaches the echo-state fixed point under constant input") {
  const ComplexMatrix h = paper_tfim(2);
  const std::vector<double> u(3000, 0.3);
  const ReadoutTrace t = run_frp(h, no_washout(ProtocolConfig::frp()), u);
  // Oracle: iterate the cycle map on the state until it stops moving.
  ComplexMatrix rho = DensityMatrix::ground(4).matrix();
  const ComplexMatrix uc = unitary_from_hamiltonian(h, 50.0);
  for (int i = 0; i < 20000; ++i) {
    rho = uc * tensor_product(encode_input(0.3).matrix(), partial_trace_first(rho)) * uc.adjoint();
  }
  const ComplexMatrix injected = tensor_product(encode_input(0.3).matrix(), partial_trace_first(rho));
  const ComplexMatrix um = unitary_from_hamiltonian(h, 50.0 / 30.0 * 7.0);
  const ComplexMatrix at = um * injected * um.adjoint();
  const double expected = (embed(pauli_z(), 2, 4) * at).trace().real();  // node (m = 7, qubit 2)
  CHECK(std::abs(t.values(2999, 6 * 4 + 2) - expected) < 1e-8);
  CHECK(max_abs(t.values.row(2999) - t.values.row(2998)) < 1e-8);
}

TEST_CASE("FRP equals hand composition of quantum-core operations") {
  Rng rng(3);
  const ComplexMatrix h = random_hermitian(4, rng);
  const std::vector<double> u{0.2, -0.7, 0.9};
  ProtocolConfig c = no_washout(ProtocolConfig::frp());
  c.clock = {2.5, 4};
  const ReadoutTrace t = run_frp(h, c, u);
  const QubitLayout layout{2, 0};
  DensityMatrix rho = DensityMatrix::ground(2);
  for (std::size_t k = 0; k < 3; ++k) {
    const ComplexMatrix injected = tensor_product(encode_input(u[k]).matrix(), partial_trace_first(rho.matrix()));
    for (std::size_t m = 1; m <= 4; ++m) {
      const ComplexMatrix um = unitary_from_hamiltonian(h, 2.5 * static_cast<double>(m) / 4.0);
      const DensityMatrix at(um * injected * um.adjoint());
      for (std::size_t q = 0; q < 2; ++q) {
        const double expected = expectation(at, embed(pauli_z(), q, 2));
        CHECK(std::abs(t.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>((m - 1) * 2 + q)) - expected) <
              1e-13);
      }
    }
    rho = inject_and_evolve(rho, u[k], unitary_from_hamiltonian(h, 2.5), layout);
  }
}

TEST_CASE("washout drops leading rows") {
  const ComplexMatrix h = paper_tfim(4);
  const auto u = random_inputs(40, 4);
  ProtocolConfig c = no_washout(ProtocolConfig::frp());
  const ReadoutTrace all = run_frp(h, c, u);
  c.washout = 10;
  const ReadoutTrace tail = run_frp(h, c, u);
  CHECK(tail.n_steps() == 30);
  CHECK(max_abs(tail.values - all.values.bottomRows(30)) == 0.0);
  c.washout = 40;
  CHECK_THROWS_AS(run_frp(h, c, u), ValueError);
}

TEST_CASE("MRP limits") {
  const ComplexMatrix h = paper_tfim(5);
  const auto u = random_inputs(120, 5);
  const ReadoutTrace frp = run_frp(h, no_washout(ProtocolConfig::frp()), u);

  SUBCASE("window covering the whole sequence reproduces FRP") {
    const ReadoutTrace mrp = run_mrp(h, ProtocolConfig::mrp(u.size()), u);
    CHECK(max_abs(mrp.values - frp.values) <= 1e-12);
  }
  SUBCASE("r = 1 rows depend only on the current input") {
    auto shuffled = u;
    Rng rng(9);
    rng.shuffle(std::span<double>(shuffled).first(shuffled.size() - 1));
    const ReadoutTrace a = run_mrp(h, ProtocolConfig::mrp(1), u);
    const ReadoutTrace b = run_mrp(h, ProtocolConfig::mrp(1), shuffled);
    CHECK(max_abs(a.values.row(119) - b.values.row(119)) == 0.0);
  }
  SUBCASE("rows only see the last r inputs") {
    auto changed = u;
    for (std::size_t k = 0; k < 100; ++k) changed[k] = -changed[k];
    const ReadoutTrace a = run_mrp(h, ProtocolConfig::mrp(6), u);
    const ReadoutTrace b = run_mrp(h, ProtocolConfig::mrp(6), changed);
    CHECK(max_abs(a.values.bottomRows(14) - b.values.bottomRows(14)) == 0.0);
    CHECK(max_abs(a.values.row(100) - b.values.row(100)) > 0.0);
  }
  SUBCASE("distance to FRP shrinks as the window grows") {
    double previous = 1e300;
    for (std::size_t r : {2, 6, 12, 20, 40}) {
      const ReadoutTrace m = run_mrp(h, ProtocolConfig::mrp(r), u);
      const double d = (m.values.bottomRows(60) - frp.values.bottomRows(60)).norm();
      CHECK(d < previous);
      previous = d;
    }
  }
  SUBCASE("r = 0 is rejected") { CHECK_THROWS_AS(run_mrp(h, ProtocolConfig::mrp(0), u), ConfigError); }
}

TEST_CASE("backaction_matrix") {
  CHECK(max_abs(backaction_matrix(0.0, 3) - RealMatrix::Ones(8, 8)) == 0.0);
  CHECK(max_abs(backaction_matrix(std::numbers::pi / 2, 1) - RealMatrix::Identity(2, 2)) < 1e-16);
  const double t = 0.3;
  const RealMatrix m = backaction_matrix(t, 2);
  CHECK(m(0, 3) == doctest::Approx(std::cos(t) * std::cos(t)));
  CHECK(m(1, 2) == doctest::Approx(std::cos(t) * std::cos(t)));
  CHECK(m(0, 1) == doctest::Approx(std::cos(t)));
  // Tensor-power structure.
  const RealMatrix m1 = backaction_matrix(t, 1);
  CHECK(max_abs(backaction_matrix(t, 3) - tensor_product(m1.cast<Complex>(), m.cast<Complex>()).real()) < 1e-15);
  CHECK_THROWS_AS(backaction_matrix(-0.1, 2), RangeError);
  CHECK_THROWS_AS(backaction_matrix(2.0, 2), RangeError);
}

TEST_CASE("WMP limits and invariants") {
  const ComplexMatrix h = paper_tfim(6);
  const auto u = random_inputs(500, 6);
  const ReadoutTrace frp = run_frp(h, no_washout(ProtocolConfig::frp()), u);
  for (bool per_sub : {false, true}) {
    CAPTURE(per_sub);
    ProtocolConfig c = no_washout(ProtocolConfig::wmp(0.0));
    c.backaction_per_subreadout = per_sub;
    CHECK(max_abs(run_wmp(h, c, u).values - frp.values) <= 1e-12);
    c.measurement_strength = 1e-9;
    CHECK(max_abs(run_wmp(h, c, u).values - frp.values) <= 1e-9);

    c.measurement_strength = 0.109;
    const ReadoutTrace w = run_wmp(h, c, u);
    CHECK(max_abs(w.values - frp.values) > 1e-6);
    const auto d = defects_of([&](const RunOptions& o) { run_wmp(h, c, u, o); });
    CHECK(d.ok());

    // Fully dephasing a trivial qubit leaves its population, so the readout is the input.
    ProtocolConfig strong = no_washout(ProtocolConfig::wmp(std::numbers::pi / 2));
    strong.backaction_per_subreadout = per_sub;
    strong.clock = {1.0, 2};
    const ReadoutTrace one = run_wmp(ComplexMatrix::Zero(2, 2), strong, std::span<const double>(u).first(50));
    for (Eigen::Index k = 0; k < 50; ++k) CHECK(std::abs(one.values(k, 1) - u[static_cast<std::size_t>(k)]) < 1e-15);
  }
}

TEST_CASE("lindblad_rhs") {
  Rng rng(7);
  SUBCASE("gamma = 0 is the commutator") {
    const ComplexMatrix h = random_hermitian(8, rng), rho = random_density(8, rng);
    CHECK(max_abs(lindblad_rhs(rho, h, 0.0) - Complex(0, -1) * (h * rho - rho * h)) < 1e-14);
  }
  SUBCASE("single excited qubit decays at rate gamma") {
    ComplexMatrix one = ComplexMatrix::Zero(2, 2);
    one(1, 1) = 1;
    const ComplexMatrix d = lindblad_rhs(one, ComplexMatrix::Zero(2, 2), 0.7);
    CHECK(d(1, 1).real() == doctest::Approx(-0.7));
    CHECK(d(0, 0).real() == doctest::Approx(0.7));
    // Closed form rho_11(t) = exp(-gamma t) against the exact superoperator exponential.
    const ComplexMatrix l = liouvillian(ComplexMatrix::Zero(2, 2), 0.7);
    const Eigen::VectorXcd v = (l * 2.0).exp() * Eigen::Map<const Eigen::VectorXcd>(one.data(), 4);
    CHECK(std::abs(v(3).real() - std::exp(-1.4)) < 1e-12);
  }
  SUBCASE("traceless and consistent with the Liouvillian") {
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix h = random_hermitian(16, rng), rho = random_density(16, rng);
      const double gamma = rng.uniform(0, 3);
      const ComplexMatrix d = lindblad_rhs(rho, h, gamma);
      CHECK(std::abs(d.trace()) < 1e-12);
      const ComplexMatrix l = liouvillian(h, gamma);
      const Eigen::VectorXcd lv = l * Eigen::Map<const Eigen::VectorXcd>(rho.data(), 256);
      CHECK((lv - Eigen::Map<const Eigen::VectorXcd>(d.data(), 256)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("explicit jump-operator form") {
    const ComplexMatrix h = random_hermitian(8, rng), rho = random_density(8, rng);
    ComplexMatrix expected = Complex(0, -1) * (h * rho - rho * h);
    for (std::size_t q = 0; q < 3; ++q) {
      const ComplexMatrix lo = embed(sigma_minus(), q, 3), hi = lo.adjoint();
      expected += 0.4 * (lo * rho * hi - 0.5 * (hi * lo * rho + rho * hi * lo));
    }
    CHECK(max_abs(lindblad_rhs(rho, h, 0.4) - expected) < 1e-14);
  }
}

TEST_CASE("drive amplitude") {
  CHECK(drive_amplitude(-1.0) == 0.0);
  CHECK(drive_amplitude(1.0) == 1.0);
  CHECK(drive_amplitude(0.0) == 0.5);
  CHECK_THROWS_AS(drive_amplitude(1.5), RangeError);
}

TEST_CASE("DSP single-qubit Rabi oscillation") {
  DrivenTfimSpec one{1, Couplings::Zero(1, 1), 0};
  ProtocolConfig c = no_washout(ProtocolConfig::dsp(0.0));
  const auto u = random_inputs(20, 8);
  const ReadoutTrace t = run_dsp(one, c, u);
  double angle = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double s = drive_amplitude(u[k]);
    for (std::size_t m = 1; m <= 10; ++m) {
      CHECK(std::abs(t.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m - 1)) -
                     std::cos(2.0 * (angle + s * 0.1 * static_cast<double>(m)))) < 1e-9);
    }
    angle += s;
  }
}

TEST_CASE("DSP strong damping pins the ground state") {
  const auto u = random_inputs(5, 9);
  const ReadoutTrace t = run_dsp(driven_spec(9), no_washout(ProtocolConfig::dsp(1e3)), u);
  CHECK((t.values.array() - 1.0).abs().maxCoeff() < 1e-3);
}

TEST_CASE("DSP readouts match the exact superoperator exponential") {
  const DrivenTfimSpec spec = driven_spec(10);
  const DrivenTfim model = make_driven_tfim(spec);
  const auto u = random_inputs(10, 10);
  for (double gamma : {0.05, 0.5, 3.0}) {
    CAPTURE(gamma);
    const ReadoutTrace t = run_dsp(spec, no_washout(ProtocolConfig::dsp(gamma)), u);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(256);
    v(0) = 1.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const ComplexMatrix prop = (liouvillian(model.at(drive_amplitude(u[k])), gamma) * 0.1).exp();
      for (std::size_t m = 0; m < 10; ++m) {
        v = prop * v;
        for (std::size_t q = 0; q < 4; ++q) {
          const RealVector z = sigma_z_diagonal(q, 4);
          double expected = 0.0;
          for (Eigen::Index a = 0; a < 16; ++a) expected += z(a) * v(a + 16 * a).real();
          worst = std::max(worst, std::abs(expected - t.values(static_cast<Eigen::Index>(k),
                                                               static_cast<Eigen::Index>(m * 4 + q))));
        }
      }
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("DSP self-convergence under step halving") {
  const DrivenTfimSpec spec = driven_spec(11);
  const auto u = random_inputs(30, 11);
  ProtocolConfig c = no_washout(ProtocolConfig::dsp(0.5));
  const ReadoutTrace coarse = run_dsp(spec, c, u);
  c.dsp_steps_per_cycle = 400;
  const ReadoutTrace fine = run_dsp(spec, c, u);
  CHECK(max_abs(coarse.values - fine.values) < 1e-7);
}

TEST_CASE("DSP substeps are refined only when the nominal step is unstable") {
  const DrivenTfim model = make_driven_tfim(driven_spec(12));
  CHECK(dsp_substeps(model, ProtocolConfig::dsp(0.5), 4) == 20);
  CHECK(dsp_substeps(model, ProtocolConfig::dsp(1e3), 4) > 20);
}

TEST_CASE("all runners keep states physical and readouts in range") {
  const ComplexMatrix h = paper_tfim(13);
  const auto u = random_inputs(300, 13);
  const auto in_range = [](const ReadoutTrace& t) { return t.values.cwiseAbs().maxCoeff() <= 1.0 + 1e-9; };
  ProtocolConfig frp = no_washout(ProtocolConfig::frp());
  CHECK(defects_of([&](const RunOptions& o) { CHECK(in_range(run_frp(h, frp, u, o))); }).ok());
  CHECK(defects_of([&](const RunOptions& o) { CHECK(in_range(run_mrp(h, ProtocolConfig::mrp(6), u, o))); }).ok());
  ProtocolConfig wmp = no_washout(ProtocolConfig::wmp(0.3));
  CHECK(defects_of([&](const RunOptions& o) { CHECK(in_range(run_wmp(h, wmp, u, o))); }).ok());
  const DrivenTfimSpec spec = driven_spec(13);
  ProtocolConfig dsp = no_washout(ProtocolConfig::dsp(0.5));
  CHECK(defects_of([&](const RunOptions& o) { CHECK(in_range(run_dsp(spec, dsp, std::span<const double>(u).first(50), o))); })
            .ok());
}

TEST_CASE("echo-state property: different initial states converge") {
  // The contraction rate varies strongly between Hamiltonians (the slowest
  // of these needs ~400 steps to reach 1e-6), so every run is 600 steps long.
  const auto u = random_inputs(600, 14);
  Rng rng(14);
  RunOptions mixed;
  mixed.initial_state = DensityMatrix(random_density(16, rng));
  const auto converge = [](const ReadoutTrace& a, const ReadoutTrace& b) {
    return max_abs(a.values.bottomRows(50) - b.values.bottomRows(50));
  };
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CAPTURE(seed);
    const ComplexMatrix h = paper_tfim(seed);
    ProtocolConfig frp = no_washout(ProtocolConfig::frp());
    CHECK(converge(run_frp(h, frp, u), run_frp(h, frp, u, mixed)) < 1e-6);
    ProtocolConfig wmp = no_washout(ProtocolConfig::wmp(0.109));
    for (bool per_sub : {false, true}) {
      wmp.backaction_per_subreadout = per_sub;
      CHECK(converge(run_wmp(h, wmp, u), run_wmp(h, wmp, u, mixed)) < 1e-6);
    }
  }
  const std::vector<double> short_u(u.begin(), u.begin() + 150);
  const DrivenTfimSpec spec = driven_spec(14);
  for (double gamma : {0.1, 1.0}) {
    CAPTURE(gamma);
    ProtocolConfig dsp = no_washout(ProtocolConfig::dsp(gamma));
    CHECK(converge(run_dsp(spec, dsp, short_u), run_dsp(spec, dsp, short_u, mixed)) < 1e-6);
  }
}

TEST_CASE("runs are bit-for-bit deterministic") {
  const ComplexMatrix h = paper_tfim(15);
  const auto u = random_inputs(200, 15);
  ProtocolConfig c = no_washout(ProtocolConfig::wmp(0.2));
  CHECK(max_abs(run_wmp(h, c, u).values - run_wmp(h, c, u).values) == 0.0);
}

TEST_CASE("runner argument validation") {
  const ComplexMatrix h = paper_tfim(16);
  const std::vector<double> bad{0.1, 1.2};
  CHECK_THROWS_AS(run_frp(h, no_washout(ProtocolConfig::frp()), bad), RangeError);
  CHECK_THROWS_AS(run_frp(h, no_washout(ProtocolConfig::frp()), std::vector<double>{}), ValueError);
  CHECK_THROWS_AS(run_frp(h, ProtocolConfig::mrp(3), std::vector<double>{0.1}), ConfigError);
  CHECK_THROWS_AS(run_wmp(h, no_washout(ProtocolConfig::wmp(2.0)), std::vector<double>{0.1}), RangeError);
  CHECK_THROWS_AS(run_dsp(driven_spec(1), no_washout(ProtocolConfig::dsp(-1.0)), std::vector<double>{0.1}), RangeError);
  CHECK_THROWS_AS(run_frp(ComplexMatrix::Zero(3, 3), no_washout(ProtocolConfig::frp()), std::vector<double>{0.1}),
                  DimensionError);
}

TEST_CASE("protocol names round-trip") {
  for (auto k : {ProtocolKind::kFrp, ProtocolKind::kMrp, ProtocolKind::kWmp, ProtocolKind::kDsp}) {
    CHECK(protocol_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(protocol_kind_from_string("XYZ"), ConfigError);
}
