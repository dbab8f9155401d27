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

// Pre- and postselected state pairs and the conditional expectation values
// they induce.  The conditional value of an observable A for the pair
// (<psi2|, |psi1>) is <psi2|A|psi1> / <psi2|psi1>; its real part shifts the
// pointer position, its imaginary part the pointer momentum.

#pragma once

#include <string>
#include <vector>

#include "tsvlab/hilbert.hpp"
#include "tsvlab/spin.hpp"

namespace tsvlab {

// Overlap magnitude below which a pair counts as orthogonal.
inline constexpr double kOrthogonalCutoff = 1e-10;

// A preselected ket |psi1> and a postselected ket |psi2> (used as the bra
// <psi2| in conditional values).  Both stored unit-normalized.
class TwoStateVector {
 public:
  // Normalizes both inputs.  Throws NearOrthogonal when |<psi2|psi1>| is
  // below kOrthogonalCutoff, and std::invalid_argument on dimension mismatch
  // or zero input.
  static TwoStateVector make(const Vector& pre, const Vector& post);

  const Vector& pre() const { return pre_; }
  const Vector& post() const { return post_; }
  Complex overlap() const;  // <psi2|psi1>
  int dim() const { return static_cast<int>(pre_.size()); }

 private:
  TwoStateVector(Vector pre, Vector post);
  Vector pre_;
  Vector post_;
};

struct WeakValue {
  Complex value;
  std::string observable_label;
};

WeakValue weak_value(const TwoStateVector& tsv, const Matrix& a,
                     const std::string& label = "");

// Conditional values of (sx, sy, sz) of the given spin system.
std::array<WeakValue, 3> weak_value_vector(const TwoStateVector& tsv,
                                           const SpinSystem& spin);

// |<psi2|psi1>|^2.
double postselect_probability(const TwoStateVector& tsv);

// Recover a qubit pair from the conditional Pauli triple (wx, wy, wz).
// Builds T = (id + w . sigma)/2, whose dominant right/left eigenvectors are
// |psi1> and |psi2>.  Throws NoSolution when the input is farther than tol
// from any realizable triple (residual of the rank-1 reconstruction).
TwoStateVector reconstruct_qubit_tsv(Complex wx, Complex wy, Complex wz,
                                     double tol = 1e-8);

}  // namespace tsvlab
