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

// Spin-j operator algebra and spin coherent states.  Basis ordering is
// m = j, j-1, ..., -j (descending) everywhere.

#pragma once

#include <array>

#include "tsvlab/hilbert.hpp"

namespace tsvlab {

inline constexpr double kUnitNormTol = 1e-12;

// Unit vector on the Bloch sphere.  Construction rejects non-unit input.
struct Direction {
  double x;
  double y;
  double z;

  Direction(double x_, double y_, double z_);

  double theta() const;  // polar angle from +z
  double phi() const;    // azimuth from +x, in (-pi, pi]
};

inline Direction dir_x() { return Direction(1.0, 0.0, 0.0); }
inline Direction dir_y() { return Direction(0.0, 1.0, 0.0); }
inline Direction dir_z() { return Direction(0.0, 0.0, 1.0); }

struct SpinSystem {
  double j;
  Matrix sx;
  Matrix sy;
  Matrix sz;
};

// Spin operators for total spin j (2j must be a nonnegative integer).
SpinSystem make_spin(double j);

// n . S for the given direction.
Matrix spin_component(const SpinSystem& spin, const Direction& n);

// Eigenstate of n . S with maximal eigenvalue j, built in closed form from
// half-angle powers and binomial weights, phase-fixed per fix_phase.
Vector coherent(const SpinSystem& spin, const Direction& n);

const Matrix& pauli_x();
const Matrix& pauli_y();
const Matrix& pauli_z();
const Matrix& pauli_id();

// n . sigma (Pauli vector, spin-1/2 without the factor 1/2).
Matrix sigma(const Direction& n);

// Spin-1/2 kets along +n and -n.
Vector qubit_up(const Direction& n);
Vector qubit_down(const Direction& n);

}  // namespace tsvlab
