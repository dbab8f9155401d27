// Copyright 2026 The tsv-lab Authors
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

#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "tsvlab/protection.hpp"
#include "tsvlab/tsv.hpp"

namespace {

using tsvlab::Complex;
using tsvlab::Direction;
using tsvlab::Matrix;
using tsvlab::ProtectionSetup;
using tsvlab::TwoStateVector;
using tsvlab::Vector;

Direction bloch_of(const Vector& psi) {
  double x = std::real(psi.dot(tsvlab::pauli_x() * psi));
  double y = std::real(psi.dot(tsvlab::pauli_y() * psi));
  double z = std::real(psi.dot(tsvlab::pauli_z() * psi));
  double len = std::sqrt(x * x + y * y + z * z);
  return Direction(x / len, y / len, z / len);
}

}  // namespace

TEST_SUITE("protection") {

TEST_CASE("joint spectrum splits into two multiplets") {
  // -lambda S . sigma on spin-N (x) spin-1/2 has total spin N+-1/2 blocks:
  // eigenvalue -lambda N with multiplicity 2N+2 and +lambda(N+1) with
  // multiplicity 2N
  struct Case {
    double n;
    double lambda;
  };
  for (Case c : {Case{6.0, 2.0}, Case{0.5, 2.0}, Case{3.5, 1.0}}) {
    ProtectionSetup setup = tsvlab::standard_setup(c.n, c.lambda, tsvlab::dir_x(),
                                                   1.0);
    Matrix h = tsvlab::build_joint_hamiltonian(setup, 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    int lower = 0;
    int upper = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double v = es.eigenvalues()(i);
      if (std::abs(v - (-c.lambda * c.n)) < 1e-9) {
        ++lower;
      } else if (std::abs(v - c.lambda * (c.n + 1.0)) < 1e-9) {
        ++upper;
      }
    }
    CHECK(lower == static_cast<int>(2.0 * c.n) + 2);
    CHECK(upper == static_cast<int>(2.0 * c.n));
  }
}

TEST_CASE("matched coherent pairs are exact eigenstates") {
  ProtectionSetup setup = tsvlab::standard_setup(9.0, 2.0, tsvlab::dir_x(), 1.0);
  Matrix h = tsvlab::build_joint_hamiltonian(setup, 0.0);
  tsvlab::SpinSystem spin = tsvlab::make_spin(9.0);
  // forward pair: device and system both along +x
  Vector fwd = tsvlab::tensor(tsvlab::coherent(spin, tsvlab::dir_x()),
                              tsvlab::qubit_up(tsvlab::dir_x()));
  CHECK((h * fwd - (-2.0 * 9.0) * fwd).norm() < 1e-10);
  // backward pair along +y
  Vector bwd = tsvlab::tensor(tsvlab::coherent(spin, tsvlab::dir_y()),
                              tsvlab::qubit_up(tsvlab::dir_y()));
  CHECK((h * bwd - (-2.0 * 9.0) * bwd).norm() < 1e-10);
  // expectation on the protected branch
  Complex e = fwd.dot(h * fwd);
  CHECK(std::abs(e - Complex(-18.0, 0.0)) < 1e-10);
}

TEST_CASE("flip probability ladder") {
  // frozen values for the time-averaged conditional flip probability at
  // p = 0, lambda = 1; the 1/N^2 falloff shows as monotone decrease
  const std::map<double, double> frozen{{4.0, 0.028284567752685889},
                                        {8.0, 0.015956665543725643},
                                        {16.0, 0.0039065410063682622}};
  double prev = 1.0;
  for (const auto& [n, want] : frozen) {
    double got = tsvlab::disturbance_probability(n, 1.0, 0.0, tsvlab::dir_x());
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
    CHECK(got < prev);
    prev = got;
  }
}

TEST_CASE("protected initial states do not flip") {
  // starting the system in the protected branch itself, the conditional
  // flip probability collapses to numerical zero
  Vector up_x = tsvlab::qubit_up(tsvlab::dir_x());
  double p = tsvlab::disturbance_probability(8.0, 1.0, 0.0, tsvlab::dir_x(),
                                             up_x);
  CHECK(p < 1e-6);
}

TEST_CASE("momentum kick biases the flip probability") {
  // frozen ladder at N=12, lambda=1: the kick lowers the conditional flip
  // probability for this pair
  double base = tsvlab::disturbance_probability(12.0, 1.0, 0.0, tsvlab::dir_x());
  CHECK(base == doctest::Approx(0.011426424).epsilon(1e-6));
  const std::map<double, double> frozen{{0.1, 0.010101410},
                                        {0.2, 0.008799020},
                                        {0.4, 0.006545771}};
  for (const auto& [p, want] : frozen) {
    double got = tsvlab::disturbance_probability(12.0, 1.0, p, tsvlab::dir_x());
    CHECK(got == doctest::Approx(want).epsilon(1e-5));
    CHECK(got < base);
  }
}

TEST_CASE("full run reading at N=16, xi=y") {
  ProtectionSetup setup = tsvlab::standard_setup(16.0, 2.0, tsvlab::dir_y(), 1.0);
  tsvlab::ProtectedRunRecord r = tsvlab::protected_run(setup, 200);
  // frozen full-precision outputs of this configuration
  CHECK(r.record.q_shift_mean ==
        doctest::Approx(0.9694769419198398).epsilon(1e-9));
  CHECK(r.record.p_shift_mean ==
        doctest::Approx(-0.00098036610089307892).epsilon(1e-6));
  CHECK(r.record.postselect_prob ==
        doctest::Approx(2.3284529058428583e-10).epsilon(1e-8));
  CHECK(r.forward_fidelity ==
        doctest::Approx(0.99996507021359793).epsilon(1e-10));
  // the backward pair is an exact joint eigenstate for xi = y, so the
  // backward sweep only accrues phase
  CHECK(r.backward_fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(r.convergence_warning);
  // reading error against the conditional value falls inside 1/N
  CHECK(std::abs(r.record.q_shift_mean - 1.0) < 1.0 / 16.0);
  // conditional weight tracks the ideal overlap 2^-2N
  CHECK(r.record.postselect_prob ==
        doctest::Approx(std::pow(2.0, -32.0)).epsilon(2e-3));
}

TEST_CASE("full run reading at N=12, xi=z") {
  ProtectionSetup setup = tsvlab::standard_setup(12.0, 2.0, tsvlab::dir_z(), 1.0);
  tsvlab::ProtectedRunRecord r = tsvlab::protected_run(setup, 200);
  CHECK(r.record.q_shift_mean ==
        doctest::Approx(-0.0093905270315471356).epsilon(1e-7));
  // imaginary conditional value appears as a momentum shift near
  // 2 sigma_p^2 Im(w) = 0.125 at sigma_p = 1/4
  CHECK(r.record.p_shift_mean ==
        doctest::Approx(0.12002094942603976).epsilon(1e-7));
  CHECK(r.record.postselect_prob ==
        doctest::Approx(6.6584663295600462e-08).epsilon(1e-6));
  CHECK(std::abs(r.record.q_shift_mean - 0.0) < 1.0 / 12.0);
}

TEST_CASE("model_spin frame of the canonical pair") {
  TwoStateVector tsv = TwoStateVector::make(tsvlab::qubit_up(tsvlab::dir_x()),
                                            tsvlab::qubit_up(tsvlab::dir_y()));
  tsvlab::ModelSpinMap map = tsvlab::model_spin(tsv);
  // expansion coefficients: <psi1|psi2> and <perp|psi2>
  CHECK(std::abs(map.a - Complex(0.5, 0.5)) < 1e-12);
  CHECK(std::abs(std::abs(map.a) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(std::norm(map.a) + std::norm(map.b) - 1.0) < 1e-12);
  // conjugated z equals lab x: the protected state is the +1 eigenstate
  CHECK((map.sigma_tilde[2] - tsvlab::pauli_x()).cwiseAbs().maxCoeff() < 1e-12);
  // basis is orthonormal
  CHECK(std::abs(map.basis[0].dot(map.basis[1])) < 1e-12);
  // chi is the Bloch direction of (a, b)
  double nz = std::norm(map.a) - std::norm(map.b);
  CHECK(map.chi.z == doctest::Approx(nz).epsilon(1e-12));
}

TEST_CASE("model construction reproduces the direct construction") {
  TwoStateVector tsv = TwoStateVector::make(tsvlab::qubit_up(tsvlab::dir_x()),
                                            tsvlab::qubit_up(tsvlab::dir_y()));
  tsvlab::ModelSpinMap map = tsvlab::model_spin(tsv);
  ProtectionSetup direct = tsvlab::standard_setup(6.0, 2.0, tsvlab::dir_y(), 1.0);
  ProtectionSetup model = tsvlab::model_setup(map, tsv, 6.0, 2.0,
                                              tsvlab::dir_y(), 1.0);
  auto rd = tsvlab::protected_run(direct, 100);
  auto rm = tsvlab::protected_run(model, 100);
  CHECK(std::abs(rd.record.q_shift_mean - rm.record.q_shift_mean) < 1e-6);
  CHECK(std::abs(rd.record.p_shift_mean - rm.record.p_shift_mean) < 1e-6);
  CHECK(std::abs(rd.record.postselect_prob - rm.record.postselect_prob) <
        1e-6 * rd.record.postselect_prob + 1e-15);
  CHECK(std::abs(rd.disturbance - rm.disturbance) < 1e-6);
}

TEST_CASE("arbitrary pairs read their conditional values within 1/N") {
  // device coherent states point along the Bloch vectors of the pair; the
  // standard isotropic coupling then protects the pair to order 1/N
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  tsvlab::SpinSystem half = tsvlab::make_spin(0.5);
  tsvlab::PointerModel pointer = tsvlab::gaussian_pointer(2.0, 1.0);
  int tested = 0;
  for (int t = 0; t < 12; ++t) {
    Vector psi1(2), psi2(2);
    psi1 << Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng));
    psi2 << Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng));
    psi1.normalize();
    psi2.normalize();
    if (std::abs(psi2.dot(psi1)) < 0.5) continue;
    ++tested;
    TwoStateVector tsv = TwoStateVector::make(psi1, psi2);
    auto wv = tsvlab::weak_value_vector(tsv, half);
    Direction axes[3] = {tsvlab::dir_x(), tsvlab::dir_y(), tsvlab::dir_z()};
    for (int a = 0; a < 3; ++a) {
      ProtectionSetup setup(2.0, 8.0, bloch_of(psi1), bloch_of(psi2), tsv,
                            axes[a], pointer, 1.0);
      auto r = tsvlab::protected_run(setup, 200);
      // Pauli conditional value is twice the spin-1/2 one
      double target = 2.0 * wv[a].value.real();
      CHECK(std::abs(r.record.q_shift_mean - target) < 1.0 / 8.0);
    }
  }
  CHECK(tested >= 5);
}

TEST_CASE("three-window tomography recovers a pair end to end") {
  ProtectionSetup setup = tsvlab::standard_setup(9.0, 5.0, tsvlab::dir_x(), 0.5);
  tsvlab::TomographyResult t = tsvlab::sequential_tomography(setup, 60, 0.5);
  // estimates approach the conditional triple (1, 1, i)
  CHECK(std::abs(t.estimates[0] - Complex(1.0, 0.0)) < 0.1);
  CHECK(std::abs(t.estimates[1] - Complex(1.0, 0.0)) < 0.1);
  CHECK(std::abs(t.estimates[2] - Complex(0.0, 1.0)) < 0.1);
  double f1 = std::norm(t.reconstructed.pre().dot(tsvlab::qubit_up(tsvlab::dir_x())));
  double f2 = std::norm(t.reconstructed.post().dot(tsvlab::qubit_up(tsvlab::dir_y())));
  CHECK(f1 > 0.95);
  CHECK(f2 > 0.95);
  CHECK(t.joint_postselect_prob > 0.0);
  CHECK(t.residual < 0.05);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS((void)tsvlab::disturbance_probability(8.0, 1.0, 0.0,
                                                        tsvlab::dir_x(),
                                                        std::nullopt, 0, 33),
                  std::invalid_argument);
  Vector bad = Vector::Ones(3);
  CHECK_THROWS_AS((void)tsvlab::disturbance_probability(8.0, 1.0, 0.0,
                                                        tsvlab::dir_x(), bad),
                  std::invalid_argument);
  ProtectionSetup setup = tsvlab::standard_setup(4.0, 2.0, tsvlab::dir_x(), 1.0);
  CHECK_THROWS_AS((void)tsvlab::protected_run(setup, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)tsvlab::sequential_tomography(setup, 12),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProtectionSetup(0.0, 4.0, tsvlab::dir_x(), tsvlab::dir_y(),
                                  setup.system_tsv, tsvlab::dir_x(),
                                  setup.pointer, 1.0),
                  std::invalid_argument);
}

}  // TEST_SUITE
