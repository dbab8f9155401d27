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

// Release gate for the library: thirteen end-to-end checks, one line of
// output each.  Exact identities are held to tight tolerances; full pointer
// simulations are held to the coarser bounds their step counts justify.
// Exit status is nonzero if any line fails.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tsvlab/hilbert.hpp"
#include "tsvlab/kaon.hpp"
#include "tsvlab/nonhermitian.hpp"
#include "tsvlab/pointer.hpp"
#include "tsvlab/protection.hpp"
#include "tsvlab/spin.hpp"
#include "tsvlab/tsv.hpp"

namespace {

using tsvlab::Complex;
using tsvlab::Direction;
using tsvlab::Matrix;
using tsvlab::Vector;

bool g_all_ok = true;

void report(int index, const char* label, bool ok, const std::string& detail) {
  std::printf("[%s] %02d %s%s%s\n", ok ? "PASS" : "FAIL", index, label,
              detail.empty() ? "" : ": ", detail.c_str());
  std::fflush(stdout);
  if (!ok) g_all_ok = false;
}

template <typename Fn>
void criterion(int index, const char* label, Fn&& fn) {
  try {
    std::pair<bool, std::string> r = fn();
    report(index, label, r.first, r.first ? "" : r.second);
  } catch (const std::exception& e) {
    report(index, label, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(6);
  out << x;
  return out.str();
}

tsvlab::TwoStateVector canonical_pair() {
  return tsvlab::TwoStateVector::make(tsvlab::qubit_up(tsvlab::dir_x()),
                                      tsvlab::qubit_up(tsvlab::dir_y()));
}

// normalized, phase-insensitive distance between two states
double state_mismatch(const Vector& a, const Vector& b) {
  return 1.0 - std::abs(a.normalized().dot(b.normalized()));
}

// -- 01 ----------------------------------------------------------------

std::pair<bool, std::string> pauli_triple_exact() {
  constexpr double kTol = 1e-12;
  auto tsv = canonical_pair();
  const Complex want[3] = {Complex(1, 0), Complex(1, 0), Complex(0, 1)};
  const Direction dirs[3] = {tsvlab::dir_x(), tsvlab::dir_y(),
                             tsvlab::dir_z()};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    auto w = tsvlab::weak_value(tsv, tsvlab::sigma(dirs[i]), "axis");
    worst = std::max(worst, std::abs(w.value - want[i]));
  }
  return {worst <= kTol, "max deviation " + fmt(worst)};
}

// -- 02 ----------------------------------------------------------------

std::pair<bool, std::string> forbidden_midpoint_value() {
  constexpr double kTol = 1e-10;
  const double inv = 1.0 / std::sqrt(2.0);
  Direction mid(inv, inv, 0.0);
  double worst = 0.0;
  for (double n : {1.0, 5.0, 10.0}) {
    tsvlab::SpinSystem spin = tsvlab::make_spin(n);
    auto tsv = tsvlab::TwoStateVector::make(
        tsvlab::coherent(spin, tsvlab::dir_x()),
        tsvlab::coherent(spin, tsvlab::dir_y()));
    auto w = tsvlab::weak_value(tsv, tsvlab::spin_component(spin, mid), "mid");
    worst = std::max(worst, std::abs(w.value - Complex(std::sqrt(2.0) * n)));
  }
  return {worst <= kTol, "max deviation " + fmt(worst)};
}

// -- 03 ----------------------------------------------------------------

std::pair<bool, std::string> weak_value_vector_scaling() {
  constexpr double kTol = 1e-10;
  double worst = 0.0;
  for (double n : {0.5, 3.0, 10.0}) {
    tsvlab::SpinSystem spin = tsvlab::make_spin(n);
    auto tsv = tsvlab::TwoStateVector::make(
        tsvlab::coherent(spin, tsvlab::dir_x()),
        tsvlab::coherent(spin, tsvlab::dir_y()));
    auto w = tsvlab::weak_value_vector(tsv, spin);
    worst = std::max(worst, std::abs(w[0].value - Complex(n, 0)));
    worst = std::max(worst, std::abs(w[1].value - Complex(n, 0)));
    worst = std::max(worst, std::abs(w[2].value - Complex(0, n)));
  }
  return {worst <= kTol, "max deviation " + fmt(worst)};
}

// -- 04 ----------------------------------------------------------------

std::pair<bool, std::string> effective_spectrum_and_vectors() {
  constexpr double kTol = 1e-10;
  Matrix h = tsvlab::effective_protector(canonical_pair(), 1.0, 1.0);
  auto sys = tsvlab::biorthogonal(h);
  double worst = std::abs(sys.omegas[0] - Complex(-1.0, 0.0));
  worst = std::max(worst, std::abs(sys.omegas[1] - Complex(1.0, 0.0)));
  worst = std::max(
      worst, state_mismatch(sys.kets[0], tsvlab::qubit_up(tsvlab::dir_x())));
  worst = std::max(
      worst, state_mismatch(sys.bras[0], tsvlab::qubit_up(tsvlab::dir_y())));
  return {worst <= kTol, "max deviation " + fmt(worst)};
}

// -- 05 ----------------------------------------------------------------

std::pair<bool, std::string> perturbed_branch_frequencies() {
  constexpr double kTol = 1e-4;
  constexpr double kStrength = 0.01;  // p / T
  const Complex wv[3] = {Complex(1, 0), Complex(1, 0), Complex(0, 1)};
  const Direction dirs[3] = {tsvlab::dir_x(), tsvlab::dir_y(),
                             tsvlab::dir_z()};
  Matrix base = tsvlab::effective_protector(canonical_pair(), 10.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    Matrix h = tsvlab::add_measurement_term(base, kStrength, 1.0, dirs[i]);
    auto pairs = tsvlab::general_eig(h);
    Complex low = Complex(-10.0, 0.0) + kStrength * wv[i];
    Complex high = Complex(10.0, 0.0) - kStrength * wv[i];
    worst = std::max(worst, std::abs(pairs[0].omega - low));
    worst = std::max(worst, std::abs(pairs[1].omega - high));
  }
  return {worst <= kTol, "max residual " + fmt(worst)};
}

// -- 06 ----------------------------------------------------------------

std::pair<bool, std::string> protected_reading_accuracy() {
  constexpr double kBound = 0.05;
  constexpr int kSteps = 200;
  const Direction dirs[3] = {tsvlab::dir_x(), tsvlab::dir_y(),
                             tsvlab::dir_z()};
  const double target[3] = {1.0, 1.0, 0.0};  // real parts of the triple
  double err20 = 0.0;
  double err40 = 0.0;
  for (int i = 0; i < 3; ++i) {
    auto r20 = tsvlab::protected_run(
        tsvlab::standard_setup(20.0, 2.0, dirs[i], 1.0), kSteps);
    auto r40 = tsvlab::protected_run(
        tsvlab::standard_setup(40.0, 2.0, dirs[i], 1.0), kSteps);
    err20 = std::max(err20, std::abs(r20.record.q_shift_mean - target[i]));
    err40 = std::max(err40, std::abs(r40.record.q_shift_mean - target[i]));
  }
  bool ok = err20 <= kBound && err40 < err20;
  return {ok, "max error " + fmt(err20) + " at size 20, " + fmt(err40) +
                  " at size 40"};
}

// -- 07 ----------------------------------------------------------------

std::pair<bool, std::string> disturbance_scaling_law() {
  constexpr double kSlopeLow = -2.6;
  constexpr double kSlopeHigh = -1.4;
  const double ladder[4] = {4.0, 8.0, 16.0, 32.0};
  double probs[4];
  for (int i = 0; i < 4; ++i) {
    probs[i] = tsvlab::disturbance_probability(ladder[i], 1.0, 0.0,
                                               tsvlab::dir_x(), std::nullopt,
                                               200, 33);
    if (i > 0 && probs[i] >= probs[i - 1]) {
      return {false, "not monotone at size " + fmt(ladder[i])};
    }
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < 4; ++i) {
    mx += std::log(ladder[i]);
    my += std::log(probs[i]);
  }
  mx /= 4.0;
  my /= 4.0;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < 4; ++i) {
    sxx += (std::log(ladder[i]) - mx) * (std::log(ladder[i]) - mx);
    sxy += (std::log(ladder[i]) - mx) * (std::log(probs[i]) - my);
  }
  double slope = sxy / sxx;
  bool ok = slope >= kSlopeLow && slope <= kSlopeHigh;
  return {ok, "slope " + fmt(slope)};
}

// -- 08 ----------------------------------------------------------------

std::pair<bool, std::string> stronger_coupling_protects_better() {
  constexpr int kSteps = 200;
  auto weak = tsvlab::protected_run(
      tsvlab::standard_setup(10.0, 2.0, tsvlab::dir_x(), 1.0), kSteps);
  auto strong = tsvlab::protected_run(
      tsvlab::standard_setup(10.0, 50.0, tsvlab::dir_x(), 1.0), kSteps);
  bool ok = strong.disturbance < weak.disturbance;
  return {ok, "disturbance " + fmt(strong.disturbance) + " vs " +
                  fmt(weak.disturbance)};
}

// -- 09 ----------------------------------------------------------------

std::pair<bool, std::string> model_spin_equivalence() {
  constexpr double kTol = 1e-6;
  constexpr int kSteps = 100;
  const Direction dirs[3] = {tsvlab::dir_x(), tsvlab::dir_y(),
                             tsvlab::dir_z()};
  auto tsv = canonical_pair();
  double worst = 0.0;
  for (const Direction& xi : dirs) {
    auto direct = tsvlab::protected_run(
        tsvlab::standard_setup(6.0, 2.0, xi, 1.0), kSteps);
    auto mapped = tsvlab::protected_run(
        tsvlab::model_setup(tsvlab::model_spin(tsv), tsv, 6.0, 2.0, xi, 1.0),
        kSteps);
    worst = std::max(worst, std::abs(direct.record.q_shift_mean -
                                     mapped.record.q_shift_mean));
    worst = std::max(worst, std::abs(direct.record.p_shift_mean -
                                     mapped.record.p_shift_mean));
    worst = std::max(worst,
                     std::abs(direct.disturbance - mapped.disturbance));
    worst = std::max(worst, std::abs(direct.record.postselect_prob -
                                     mapped.record.postselect_prob) /
                                direct.record.postselect_prob);
  }
  return {worst <= kTol, "max deviation " + fmt(worst)};
}

// -- 10 ----------------------------------------------------------------

std::pair<bool, std::string> biorthogonal_round_trip() {
  constexpr double kRoundTol = 1e-8;
  constexpr double kNormTol = 1e-10;
  std::mt19937 rng(4242);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](int d) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    }
    return m;
  };
  double worst_round = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    int d = 2 + trial % 5;
    Matrix m = draw(d);
    Matrix rebuilt = tsvlab::assemble(tsvlab::general_eig(m));
    worst_round =
        std::max(worst_round, (rebuilt - m).cwiseAbs().maxCoeff());
  }
  double worst_norm = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int d = 2 + trial % 5;
    Matrix g = draw(d);
    Matrix h = 0.5 * (g + g.adjoint());
    Vector psi = Vector::Zero(d);
    for (int i = 0; i < d; ++i) psi(i) = Complex(gauss(rng), gauss(rng));
    psi.normalize();
    for (double t : {0.5, 2.0}) {
      auto r = tsvlab::evolve_nonhermitian(h, psi, t);
      worst_norm = std::max(worst_norm, std::abs(r.norm_factor - 1.0));
    }
  }
  bool ok = worst_round <= kRoundTol && worst_norm <= kNormTol;
  return {ok, "round trip " + fmt(worst_round) + ", norm factor drift " +
                  fmt(worst_norm)};
}

// -- 11 ----------------------------------------------------------------

std::pair<bool, std::string> decay_overlap_relation() {
  constexpr double kTol = 1e-9;
  std::mt19937 rng(702);
  std::uniform_real_distribution<double> mass(-1.0, 1.0);
  std::uniform_real_distribution<double> rate(0.001, 0.5);
  std::uniform_real_distribution<double> gap(0.1, 2.0);
  std::uniform_real_distribution<double> eps(-0.07, 0.07);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    tsvlab::KaonParams params;
    params.m_l = mass(rng);
    params.m_s = mass(rng);
    params.gamma_l = rate(rng);
    params.gamma_s = params.gamma_l + gap(rng);
    params.epsilon = Complex(eps(rng), eps(rng));
    tsvlab::validate(params);
    auto check = tsvlab::kaon_overlap_check(params);
    worst = std::max(worst, std::abs(check.measured - check.predicted));
  }
  tsvlab::KaonParams flat;
  flat.epsilon = Complex(0.0, 0.0);
  bool exact_orthogonal =
      std::abs(tsvlab::kaon_overlap_check(flat).ket_overlap) == 0.0;
  bool ok = worst <= kTol && exact_orthogonal;
  return {ok, "max deviation " + fmt(worst) +
                  (exact_orthogonal ? "" : ", zero-admixture overlap not 0")};
}

// -- 12 ----------------------------------------------------------------

std::pair<bool, std::string> tomography_reconstruction() {
  constexpr double kFidelity = 0.99;
  auto setup = tsvlab::standard_setup(25.0, 5.0, tsvlab::dir_x(), 0.5);
  auto result = tsvlab::sequential_tomography(setup, 150);
  auto tsv = canonical_pair();
  double f_pre = std::norm(result.reconstructed.pre().dot(tsv.pre()));
  double f_post = std::norm(result.reconstructed.post().dot(tsv.post()));
  bool ok = f_pre > kFidelity && f_post > kFidelity;
  return {ok, "fidelities " + fmt(f_pre) + " and " + fmt(f_post)};
}

// -- 13 ----------------------------------------------------------------

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::pair<bool, std::string> bundled_runs_deterministic() {
  const std::pair<const char*, const char*> scenarios[] = {
      {"weak-value", "qubit_xy.json"},
      {"protect", "protect.json"},
      {"disturbance-scan", "disturbance_scan.json"},
      {"tomography", "tomography.json"},
      {"adiabatic-single", "adiabatic_single.json"},
      {"kaon", "kaon.json"},
      {"spectrum", "spectrum.json"},
  };
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      ("tsv-lab-acceptance-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  for (const auto& [scenario, config] : scenarios) {
    std::string bytes[2];
    for (int run = 0; run < 2; ++run) {
      std::filesystem::path out =
          dir / (std::string(scenario) + "." + std::to_string(run));
      std::string cmd = std::string("\"") + TSVLAB_CLI_PATH + "\" " +
                        scenario + " --config \"" + TSVLAB_CONFIG_DIR + "/" +
                        config + "\" --output \"" + out.string() + "\" 2> \"" +
                        (dir / "stderr.txt").string() + "\"";
      int status = std::system(cmd.c_str());
      if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        return {false, std::string(scenario) + " exited nonzero"};
      }
      bytes[run] = slurp(out);
    }
    if (bytes[0].empty() || bytes[0] != bytes[1]) {
      return {false, std::string(scenario) + " output not byte-identical"};
    }
  }
  return {true, ""};
}

}  // namespace

int main() {
  criterion(1, "conditional Pauli triple is (1, 1, i)", pauli_triple_exact);
  criterion(2, "midpoint component reads sqrt(2) n", forbidden_midpoint_value);
  criterion(3, "conditional spin vector is (n, n, in)",
            weak_value_vector_scaling);
  criterion(4, "effective two-level spectrum and eigenstates",
            effective_spectrum_and_vectors);
  criterion(5, "measurement term shifts the branch frequencies",
            perturbed_branch_frequencies);
  criterion(6, "full pointer simulation reads the real parts",
            protected_reading_accuracy);
  criterion(7, "flip probability falls as an inverse power",
            disturbance_scaling_law);
  criterion(8, "stronger coupling disturbs less",
            stronger_coupling_protects_better);
  criterion(9, "model-spin frame reproduces the direct run",
            model_spin_equivalence);
  criterion(10, "spectral round trip and Hermitian norm conservation",
            biorthogonal_round_trip);
  criterion(11, "decay eigenstate overlap identity",
            decay_overlap_relation);
  criterion(12, "sequential reconstruction recovers both states",
            tomography_reconstruction);
  criterion(13, "bundled scenario reruns are byte-identical",
            bundled_runs_deterministic);
  return g_all_ok ? 0 : 1;
}
