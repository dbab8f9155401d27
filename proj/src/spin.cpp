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

#include "tsvlab/spin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsvlab {

Direction::Direction(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
  double norm = std::sqrt(x * x + y * y + z * z);
  if (std::abs(norm - 1.0) > kUnitNormTol) {
    std::ostringstream msg;
    msg << "Direction: (" << x_ << ", " << y_ << ", " << z_ << ") has norm "
        << norm << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

double Direction::theta() const { return std::acos(std::clamp(z, -1.0, 1.0)); }

double Direction::phi() const {
  if (x == 0.0 && y == 0.0) return 0.0;
  return std::atan2(y, x);
}

SpinSystem make_spin(double j) {
  double two_j = 2.0 * j;
  if (j < 0.0 || std::abs(two_j - std::round(two_j)) > 1e-12) {
    std::ostringstream msg;
    msg << "make_spin: 2j must be a nonnegative integer, got j = " << j;
    throw std::invalid_argument(msg.str());
  }
  int dim = static_cast<int>(std::round(two_j)) + 1;
  Matrix sp = Matrix::Zero(dim, dim);  // raising operator
  // basis index k holds m = j - k
  for (int k = 1; k < dim; ++k) {
    double m = j - k;
    sp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  Matrix sm = sp.adjoint();
  SpinSystem spin;
  spin.j = j;
  spin.sx = 0.5 * (sp + sm);
  spin.sy = Complex(0.0, -0.5) * (sp - sm);
  spin.sz = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    spin.sz(k, k) = j - k;
  }
  return spin;
}

Matrix spin_component(const SpinSystem& spin, const Direction& n) {
  return n.x * spin.sx + n.y * spin.sy + n.z * spin.sz;
}

Vector coherent(const SpinSystem& spin, const Direction& n) {
  // rotate |m = j> to point along n: component k picks up
  // sqrt(C(2j, k)) cos(theta/2)^(2j-k) sin(theta/2)^k e^(i k phi),
  // evaluated in logs to stay finite at large j
  double theta = n.theta();
  double phi = n.phi();
  double two_j = 2.0 * spin.j;
  int dim = static_cast<int>(std::round(two_j)) + 1;
  double lc = std::log(std::max(std::cos(0.5 * theta), 0.0));
  double ls = std::log(std::max(std::sin(0.5 * theta), 0.0));
  Vector v(dim);
  for (int k = 0; k < dim; ++k) {
    double log_binom = std::lgamma(two_j + 1.0) - std::lgamma(k + 1.0) -
                       std::lgamma(two_j - k + 1.0);
    double log_mag;
    if (k == 0) {
      log_mag = 0.5 * log_binom + two_j * lc;
    } else if (k == dim - 1) {
      log_mag = 0.5 * log_binom + two_j * ls;
    } else {
      log_mag = 0.5 * log_binom + (two_j - k) * lc + k * ls;
    }
    double mag = std::isfinite(log_mag) ? std::exp(log_mag) : 0.0;
    v(k) = mag * std::exp(Complex(0.0, k * phi));
  }
  v.normalize();
  return fix_phase(v);
}

namespace {

Matrix make_pauli(int which) {
  Matrix m(2, 2);
  switch (which) {
    case 0:
      m << 0, 1, 1, 0;
      break;
    case 1:
      m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      break;
    case 2:
      m << 1, 0, 0, -1;
      break;
    default:
      m << 1, 0, 0, 1;
      break;
  }
  return m;
}

}  // namespace

const Matrix& pauli_x() {
  static const Matrix m = make_pauli(0);
  return m;
}

const Matrix& pauli_y() {
  static const Matrix m = make_pauli(1);
  return m;
}

const Matrix& pauli_z() {
  static const Matrix m = make_pauli(2);
  return m;
}

const Matrix& pauli_id() {
  static const Matrix m = make_pauli(3);
  return m;
}

Matrix sigma(const Direction& n) {
  return n.x * pauli_x() + n.y * pauli_y() + n.z * pauli_z();
}

Vector qubit_up(const Direction& n) {
  SpinSystem half = make_spin(0.5);
  return coherent(half, n);
}

Vector qubit_down(const Direction& n) {
  return qubit_up(Direction(-n.x, -n.y, -n.z));
}

}  // namespace tsvlab
