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

#include "tsvlab/tsv.hpp"

#include <cmath>
#include <sstream>

namespace tsvlab {

TwoStateVector::TwoStateVector(Vector pre, Vector post)
    : pre_(std::move(pre)), post_(std::move(post)) {}

TwoStateVector TwoStateVector::make(const Vector& pre, const Vector& post) {
  if (pre.size() != post.size()) {
    std::ostringstream msg;
    msg << "TwoStateVector: dimensions " << pre.size() << " and "
        << post.size() << " differ";
    throw std::invalid_argument(msg.str());
  }
  if (pre.size() == 0) {
    throw std::invalid_argument("TwoStateVector: empty state");
  }
  double npre = pre.norm();
  double npost = post.norm();
  if (npre == 0.0 || npost == 0.0) {
    throw std::invalid_argument("TwoStateVector: zero state");
  }
  Vector a = pre / npre;
  Vector b = post / npost;
  Complex ov = b.adjoint() * a;
  if (std::abs(ov) < kOrthogonalCutoff) {
    std::ostringstream msg;
    msg << "TwoStateVector: overlap magnitude " << std::abs(ov) << " below "
        << kOrthogonalCutoff;
    throw NearOrthogonal(msg.str());
  }
  return TwoStateVector(std::move(a), std::move(b));
}

Complex TwoStateVector::overlap() const {
  return (post_.adjoint() * pre_)(0, 0);
}

WeakValue weak_value(const TwoStateVector& tsv, const Matrix& a,
                     const std::string& label) {
  if (a.rows() != tsv.dim() || a.cols() != tsv.dim()) {
    std::ostringstream msg;
    msg << "weak_value: observable is " << a.rows() << "x" << a.cols()
        << ", state dimension is " << tsv.dim();
    throw std::invalid_argument(msg.str());
  }
  Complex num = (tsv.post().adjoint() * a * tsv.pre())(0, 0);
  return WeakValue{num / tsv.overlap(), label};
}

std::array<WeakValue, 3> weak_value_vector(const TwoStateVector& tsv,
                                           const SpinSystem& spin) {
  return {weak_value(tsv, spin.sx, "sx"), weak_value(tsv, spin.sy, "sy"),
          weak_value(tsv, spin.sz, "sz")};
}

double postselect_probability(const TwoStateVector& tsv) {
  double m = std::abs(tsv.overlap());
  return m * m;
}

TwoStateVector reconstruct_qubit_tsv(Complex wx, Complex wy, Complex wz,
                                     double tol) {
  // T = (id + w.sigma)/2 equals |psi1><psi2| / <psi2|psi1>, so the pair is
  // the dominant right/left eigenvector pair of T
  Matrix t = 0.5 * (pauli_id() + wx * pauli_x() + wy * pauli_y() +
                    wz * pauli_z());
  Eigen::ComplexEigenSolver<Matrix> es(t);
  if (es.info() != Eigen::Success) {
    throw NoSolution("reconstruct_qubit_tsv: eigensolver failed");
  }
  int dominant = std::abs(es.eigenvalues()(0)) >= std::abs(es.eigenvalues()(1))
                     ? 0
                     : 1;
  Vector right = es.eigenvectors().col(dominant);
  Matrix vinv = es.eigenvectors().partialPivLu().inverse();
  Vector left = vinv.row(dominant).adjoint();
  right.normalize();
  left.normalize();

  // a realizable triple makes T rank one with trace 1; measure the distance
  // of the input from that manifold
  Complex lam = es.eigenvalues()(dominant);
  Complex ip = (left.adjoint() * right)(0, 0);
  if (std::abs(ip) < kOrthogonalCutoff) {
    throw NearOrthogonal(
        "reconstruct_qubit_tsv: reconstructed pair is orthogonal");
  }
  Matrix model = (lam / ip) * (right * left.adjoint());
  double residual = (t - model).cwiseAbs().maxCoeff();
  if (residual > tol) {
    std::ostringstream msg;
    msg << "reconstruct_qubit_tsv: rank-1 residual " << residual
        << " exceeds tolerance " << tol;
    throw NoSolution(msg.str());
  }
  return TwoStateVector::make(fix_phase(right), fix_phase(left));
}

}  // namespace tsvlab
