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

// Dense complex linear algebra helpers shared by every other module:
// tensor products, matrix exponentials applied to states, and biorthogonal
// eigendecompositions of general (not necessarily Hermitian) operators.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tsvlab/errors.hpp"

namespace tsvlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDegenerateGap = 1e-8;

// Kronecker product with the FIRST factor varying slowest: index of the
// result is i*cols(b)+k over rows, j*cols(b)+l over columns.  All composite
// spaces in this library are ordered device (x) system with this convention.
Matrix tensor(const Matrix& a, const Matrix& b);
Vector tensor(const Vector& a, const Vector& b);

bool is_hermitian(const Matrix& h, double tol = kHermitianTol);

// exp(-i h t) psi.  Hermitian h goes through a self-adjoint solve; general h
// through a complex eigendecomposition, falling back to a scaling-and-squaring
// exponential when the eigenbasis is too ill-conditioned to invert.
Vector expm_apply(const Matrix& h, const Vector& psi, double t);

// Dense propagator exp(-i h t).
Matrix expm_propagator(const Matrix& h, double t);

// Rotate the global phase so the largest-magnitude component is real and
// positive.  Ties in magnitude resolve to the lowest index.
Vector fix_phase(const Vector& v);

// One eigenvalue with its right eigenvector and the matching left eigenvector,
// normalized to left.adjoint()*right == 1.
struct EigPair {
  Complex omega;
  Vector right;
  Vector left;
};

// Full biorthogonal eigendecomposition, sorted by (Re omega, Im omega)
// ascending.  Rights carry the fix_phase convention; the matching lefts are
// scaled by the same factor so the pairing stays normalized.  Throws
// DegenerateSpectrum when the smallest eigenvalue gap is below
// kDegenerateGap relative to the largest matrix entry.
std::vector<EigPair> general_eig(const Matrix& h);

// Rebuild sum_i omega_i |right_i><left_i| from the pairs.
Matrix assemble(const std::vector<EigPair>& pairs);

}  // namespace tsvlab
