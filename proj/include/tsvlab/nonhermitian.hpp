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

// Effective non-Hermitian generators for pre- and postselected ensembles.
// A protected two-state pair evolves, to leading order in 1/N, under
// h_eff = -lambda N (w . sigma) where w is the conditional Pauli triple;
// complex w makes h_eff non-Hermitian, with biorthogonal left/right
// eigenbranches evolving independently.

#pragma once

#include <vector>

#include "tsvlab/hilbert.hpp"
#include "tsvlab/spin.hpp"
#include "tsvlab/tsv.hpp"

namespace tsvlab {

inline constexpr double kBranchFloor = 1e-300;

struct BiorthogonalSystem {
  std::vector<Complex> omegas;
  std::vector<Vector> kets;   // right eigenvectors
  std::vector<Vector> bras;   // matching lefts, bras[i].adjoint()*kets[j] = delta_ij
  double condition;           // condition number of the right eigenbasis
};

BiorthogonalSystem biorthogonal(const Matrix& h);

// -lambda N (wx sx-part...) built from the conditional Pauli triple of the
// system pair: -lambda N sum_i w_i sigma_i.
Matrix effective_protector(const TwoStateVector& tsv, double lambda, double n);

// h + (p / T) * sigma along xi, the measurement back-action on the system
// block during a coupling window of length T at momentum p.
Matrix add_measurement_term(const Matrix& h, double p, double T,
                            const Direction& xi);
Matrix add_measurement_term(const Matrix& h, double p, double T,
                            const Matrix& observable);

struct EvolutionResult {
  Vector state;        // normalized
  double norm_factor;  // 1 / norm of the unnormalized evolved state
  std::vector<Complex> branch_amplitudes;  // alpha_i exp(-i omega_i t)
};

// Evolve psi under non-Hermitian h for time t through the biorthogonal
// branch expansion.  Throws UnderflowedBranch when every branch amplitude
// magnitude falls below kBranchFloor.
EvolutionResult evolve_nonhermitian(const Matrix& h, const Vector& psi,
                                    double t);

// Evolve a bra (costate) backwards: phi(t) such that <phi(t)| solves the
// adjoint equation with final condition <phi_T| at t.  Equivalent to forward
// evolution under h.adjoint() for time -(T - t) up to normalization.
EvolutionResult backward_evolve(const Matrix& h, const Vector& phi_T,
                                double T, double t);

struct BranchOutcome {
  Complex omega;
  double probability;
};

// Relative branch weights |alpha_i exp(-i omega_i T)|^2, normalized to 1.
// In the adiabatic limit these are the outcome probabilities of a slow
// measurement that resolves the eigenbranches.
std::vector<BranchOutcome> adiabatic_branches(const Matrix& h,
                                              const Vector& psi, double T);

}  // namespace tsvlab
