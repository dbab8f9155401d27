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

// Neutral-kaon-style two-level decay: a non-Hermitian Hamiltonian whose
// non-orthogonal eigenstates (short- and long-lived) realize a naturally
// occurring two-state-vector system.  Backward-evolved bras differ from
// forward-evolved kets, and the overlap between the two short-lived states
// measures the CP admixture epsilon.

#pragma once

#include <array>

#include "tsvlab/hilbert.hpp"
#include "tsvlab/nonhermitian.hpp"

namespace tsvlab {

struct KaonParams {
  double m_l = 0.0;      // long-lived mass
  double m_s = 0.0;      // short-lived mass
  double gamma_l = 0.002;
  double gamma_s = 1.0;
  Complex epsilon = Complex(0.002, 0.0);
};

// Validated constructor-style check: gamma_s > gamma_l > 0, |epsilon| < 0.1.
void validate(const KaonParams& params);

// Short- and long-lived kets in the (K0, K0bar) basis, unit-normalized:
// K_S ~ (K1 + eps K2), K_L ~ (K2 + eps K1) with K1/K2 the CP eigenstates.
Vector kaon_ket_s(const KaonParams& params);
Vector kaon_ket_l(const KaonParams& params);

// Non-Hermitian Hamiltonian assembled from the kets and the complex
// frequencies omega = m - i gamma / 2 through the dual (left) basis, so
// kaon_ket_s / kaon_ket_l are exact right eigenvectors.
Matrix kaon_hamiltonian(const KaonParams& params);

struct KaonOverlapCheck {
  double measured;   // |<K'_S|K_S>| from the assembled eigenvectors
  double predicted;  // sqrt(1 - |<K_S|K_L>|^2)
  Complex ket_overlap;  // <K_S|K_L>
};

// The bra dual to K_L (the backward-evolving long-lived state) is K'_S up to
// normalization: its overlap with K_S obeys
// |<K'_S|K_S>| = sqrt(1 - |<K_S|K_L>|^2) exactly for unit vectors.
KaonOverlapCheck kaon_overlap_check(const KaonParams& params);

struct KaonSurvival {
  double t;
  std::array<BranchOutcome, 2> branches;  // (short, long) relative weights
  double norm_factor;
};

// Evolve an initial K0 for time t and report the relative branch weights;
// past a few short lifetimes the surviving population is almost purely
// long-lived.
KaonSurvival survival_postselected_run(const KaonParams& params, double t);

}  // namespace tsvlab
