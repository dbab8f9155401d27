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

// Protection of a pre- and postselected qubit by a large auxiliary spin.
// The device spin N is pre selected along pre_dir and post selected along
// post_dir; the coupling -lambda S . sigma pins the system to the device on
// both branches, so a slow pointer coupled to sigma_xi reads the conditional
// value (sigma_xi)_w instead of an eigenvalue.  Readout error falls off as
// 1/N.

#pragma once

#include <array>
#include <optional>

#include "tsvlab/hilbert.hpp"
#include "tsvlab/nonhermitian.hpp"
#include "tsvlab/pointer.hpp"
#include "tsvlab/spin.hpp"
#include "tsvlab/tsv.hpp"

namespace tsvlab {

// Ratio below the ideal-run postselection weight at which the conditional
// branch counts as dead.
inline constexpr double kDeadBranchRel = 1e-12;

struct ProtectionSetup {
  double lambda;
  double n;  // device spin magnitude N
  Direction pre_dir;
  Direction post_dir;
  TwoStateVector system_tsv;
  Direction meas_dir;
  PointerModel pointer;
  double duration = 1.0;
  // Pauli triple used in the protection coupling; defaults to (sx, sy, sz).
  // Replaced by the conjugated triple when a setup is built from a
  // ModelSpinMap.
  std::array<Matrix, 3> sigma_triple;

  ProtectionSetup(double lambda, double n, Direction pre, Direction post,
                  TwoStateVector tsv, Direction meas, PointerModel pointer,
                  double duration = 1.0);
};

// Standard setup: device x -> y, system up_x -> up_y, pointer of momentum
// cutoff p_max (delta = 2 / p_max).
ProtectionSetup standard_setup(double n, double lambda, const Direction& xi,
                               double p_max);

// -lambda S . sigma + p (id x sigma_xi) on device (x) system, for one
// momentum sector p.
Matrix build_joint_hamiltonian(const ProtectionSetup& setup, double p);

struct ProtectedRunRecord {
  MeasurementRecord record;
  // 1 - Ffwd*Fbwd with both conditional system fidelities averaged over the
  // slice boundaries of the run; the forward (backward) fidelity holds the
  // device projected on its pre (post) coherent state.
  double disturbance;
  double forward_fidelity;
  double backward_fidelity;
  bool convergence_warning;
  double convergence_delta;
};

// Full joint-evolution run of the protected measurement: per momentum
// sector, evolve device+system over [0, duration] with the scheduled
// coupling, postselect the device (only the device) along post_dir, and
// read the pointer shifts from the conditional amplitudes summed over the
// free system index.  postselect_prob falls like |<post|pre>|^2 ~ 2^-2N.
// Throws DeadBranch when the conditional weight drops kDeadBranchRel below
// the ideal run's.
ProtectedRunRecord protected_run(const ProtectionSetup& setup, int steps);

// Probability that a projective check at an intermediate time finds the
// system flipped out of its initial state, conditioned on the device
// postselection at the final time.  With the default initial state down_y
// (orthogonal to the protected up_x branch at xi = x) this is the
// conditional flip probability, which falls like 1/N^2; a momentum kick p
// biases the coupling window.  Averaged over time_samples interior times.
double disturbance_probability(double n, double lambda, double p,
                               const Direction& xi,
                               const std::optional<Vector>& initial_system =
                                   std::nullopt,
                               int steps = 200, int time_samples = 33);

// Two-dimensional model spin carrying a general qubit pair: an orthonormal
// basis (|psi1>, |perp>), the expansion <psi1|psi2> = a, <perp|psi2> = b,
// the Bloch direction chi of the spinor (a, b), and the Pauli triple
// conjugated into that basis.
struct ModelSpinMap {
  std::array<Vector, 2> basis;
  Complex a;
  Complex b;
  Direction chi;
  std::array<Matrix, 3> sigma_tilde;
};

// Build the model-spin frame of an arbitrary nondegenerate qubit pair.
// When psi2 is parallel to psi1 the frame degenerates smoothly to chi = z.
ModelSpinMap model_spin(const TwoStateVector& tsv);

// Protection setup in the model frame: device z -> chi, coupling through
// sigma_tilde, measurement still along the lab direction xi.  Produces runs
// identical to the direct construction.
ProtectionSetup model_setup(const ModelSpinMap& map, const TwoStateVector& tsv,
                            double n, double lambda, const Direction& xi,
                            double p_max);

struct TomographyResult {
  std::array<Complex, 3> estimates;  // conditional (sx, sy, sz) readings
  TwoStateVector reconstructed;
  double residual;
  double joint_postselect_prob;
};

// Read all three Pauli components in one protected run by splitting the
// duration into three equal coupling windows (x, y, z order), each with its
// own independent pointer, then reconstruct the pair from the readings.
TomographyResult sequential_tomography(const ProtectionSetup& setup, int steps,
                                       double reconstruct_tol = 0.05);

}  // namespace tsvlab
