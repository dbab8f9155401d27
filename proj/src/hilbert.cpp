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

#include "tsvlab/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace tsvlab {

namespace {

void check_finite(const Matrix& h, const char* who) {
  if (!h.allFinite()) {
    std::ostringstream msg;
    msg << who << ": matrix has non-finite entries";
    throw std::invalid_argument(msg.str());
  }
}

void check_square(const Matrix& h, const char* who) {
  if (h.rows() != h.cols()) {
    std::ostringstream msg;
    msg << who << ": matrix is " << h.rows() << "x" << h.cols()
        << ", expected square";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

Matrix tensor(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector tensor(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

bool is_hermitian(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace {

// exp(-i h t) through an eigendecomposition; falls back to a dense Pade
// exponential when the eigenbasis inverse is unreliable.
Matrix propagator_impl(const Matrix& h, double t) {
  const Complex mit(0.0, -t);
  if (is_hermitian(h)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Eigen::VectorXd& w = es.eigenvalues();
    Vector phases(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      phases(k) = std::exp(mit * w(k));
    }
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
  }
  Eigen::ComplexEigenSolver<Matrix> es(h);
  if (es.info() == Eigen::Success) {
    const Matrix& v = es.eigenvectors();
    Eigen::PartialPivLU<Matrix> lu(v);
    Matrix vinv = lu.inverse();
    double resid = (v * vinv - Matrix::Identity(h.rows(), h.cols()))
                       .cwiseAbs()
                       .maxCoeff();
    if (resid < 1e-8) {
      Vector phases(h.rows());
      for (Eigen::Index k = 0; k < h.rows(); ++k) {
        phases(k) = std::exp(mit * es.eigenvalues()(k));
      }
      return v * phases.asDiagonal() * vinv;
    }
  }
  Matrix gen = mit * h;
  return gen.exp();
}

}  // namespace

Vector expm_apply(const Matrix& h, const Vector& psi, double t) {
  check_square(h, "expm_apply");
  check_finite(h, "expm_apply");
  if (!psi.allFinite()) {
    throw std::invalid_argument("expm_apply: state has non-finite entries");
  }
  if (h.cols() != psi.size()) {
    std::ostringstream msg;
    msg << "expm_apply: operator dimension " << h.cols()
        << " does not match state dimension " << psi.size();
    throw std::invalid_argument(msg.str());
  }
  return propagator_impl(h, t) * psi;
}

Matrix expm_propagator(const Matrix& h, double t) {
  check_square(h, "expm_propagator");
  check_finite(h, "expm_propagator");
  return propagator_impl(h, t);
}

Vector fix_phase(const Vector& v) {
  Eigen::Index pivot = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v(i));
    // strict comparison keeps the lowest index on exact ties
    if (a > best) {
      best = a;
      pivot = i;
    }
  }
  if (best <= 0.0) return v;
  Complex factor = std::conj(v(pivot)) / best;
  return v * factor;
}

std::vector<EigPair> general_eig(const Matrix& h) {
  check_square(h, "general_eig");
  check_finite(h, "general_eig");
  const Eigen::Index n = h.rows();
  if (n == 0) return {};

  Eigen::ComplexEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("general_eig: eigensolver failed to converge");
  }
  const Vector& w = es.eigenvalues();
  const Matrix& v = es.eigenvectors();

  double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(w(i) - w(j)) <= kDegenerateGap * scale) {
        std::ostringstream msg;
        msg << "general_eig: eigenvalue gap " << std::abs(w(i) - w(j))
            << " below " << kDegenerateGap << " * " << scale;
        throw DegenerateSpectrum(msg.str());
      }
    }
  }

  Matrix vinv = v.partialPivLu().inverse();

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (w(a).real() != w(b).real()) return w(a).real() < w(b).real();
    return w(a).imag() < w(b).imag();
  });

  std::vector<EigPair> pairs;
  pairs.reserve(n);
  for (Eigen::Index rank = 0; rank < n; ++rank) {
    Eigen::Index i = order[rank];
    Vector right = v.col(i);
    Vector left = vinv.row(i).adjoint();
    // same phase factor on both sides keeps left.adjoint()*right == 1
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      double a = std::abs(right(k));
      if (a > best) {
        best = a;
        pivot = k;
      }
    }
    if (best > 0.0) {
      Complex factor = std::conj(right(pivot)) / best;
      right *= factor;
      left *= factor;
    }
    pairs.push_back(EigPair{w(i), std::move(right), std::move(left)});
  }
  return pairs;
}

Matrix assemble(const std::vector<EigPair>& pairs) {
  if (pairs.empty()) return Matrix(0, 0);
  const Eigen::Index n = pairs.front().right.size();
  Matrix out = Matrix::Zero(n, n);
  for (const EigPair& p : pairs) {
    out += p.omega * (p.right * p.left.adjoint());
  }
  return out;
}

}  // namespace tsvlab
