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

#include "tsvlab/nonhermitian.hpp"

#include <cmath>
#include <limits>

namespace tsvlab {

BiorthogonalSystem biorthogonal(const Matrix& h) {
  std::vector<EigPair> pairs = general_eig(h);
  BiorthogonalSystem sys;
  const Eigen::Index n = h.rows();
  Matrix rights(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sys.omegas.push_back(pairs[i].omega);
    sys.kets.push_back(pairs[i].right);
    sys.bras.push_back(pairs[i].left);
    rights.col(i) = pairs[i].right;
  }
  Eigen::JacobiSVD<Matrix> svd(rights);
  double smin = svd.singularValues()(n - 1);
  sys.condition = smin > 0.0 ? svd.singularValues()(0) / smin
                             : std::numeric_limits<double>::infinity();
  return sys;
}

Matrix effective_protector(const TwoStateVector& tsv, double lambda,
                           double n) {
  if (tsv.dim() != 2) {
    throw std::invalid_argument(
        "effective_protector: system pair must be two-dimensional");
  }
  SpinSystem half = make_spin(0.5);
  auto w = weak_value_vector(tsv, half);
  // pauli conditional values are twice the spin-1/2 ones
  Complex wx = 2.0 * w[0].value;
  Complex wy = 2.0 * w[1].value;
  Complex wz = 2.0 * w[2].value;
  return -lambda * n *
         (wx * pauli_x() + wy * pauli_y() + wz * pauli_z());
}

Matrix add_measurement_term(const Matrix& h, double p, double T,
                            const Direction& xi) {
  if (h.rows() != 2 || h.cols() != 2) {
    throw std::invalid_argument(
        "add_measurement_term: direction overload needs a 2x2 generator");
  }
  return h + (p / T) * sigma(xi);
}

Matrix add_measurement_term(const Matrix& h, double p, double T,
                            const Matrix& observable) {
  if (h.rows() != observable.rows() || h.cols() != observable.cols()) {
    throw std::invalid_argument("add_measurement_term: dimension mismatch");
  }
  if (!is_hermitian(observable)) {
    throw std::invalid_argument(
        "add_measurement_term: observable must be Hermitian");
  }
  return h + (p / T) * observable;
}

namespace {

EvolutionResult expand_branches(const std::vector<Complex>& amps,
                                const std::vector<Vector>& basis) {
  EvolutionResult result;
  result.branch_amplitudes = amps;
  double peak = 0.0;
  for (const Complex& a : amps) peak = std::max(peak, std::abs(a));
  if (peak < kBranchFloor) {
    throw UnderflowedBranch(
        "evolution: every branch amplitude fell below 1e-300");
  }
  Vector unnorm = Vector::Zero(basis.front().size());
  for (size_t i = 0; i < amps.size(); ++i) {
    unnorm += amps[i] * basis[i];
  }
  double nrm = unnorm.norm();
  if (nrm < kBranchFloor) {
    throw UnderflowedBranch("evolution: evolved state underflowed");
  }
  result.norm_factor = 1.0 / nrm;
  result.state = unnorm / nrm;
  return result;
}

}  // namespace

EvolutionResult evolve_nonhermitian(const Matrix& h, const Vector& psi,
                                    double t) {
  if (h.cols() != psi.size()) {
    throw std::invalid_argument("evolve_nonhermitian: dimension mismatch");
  }
  BiorthogonalSystem sys = biorthogonal(h);
  std::vector<Complex> amps(sys.omegas.size());
  for (size_t i = 0; i < sys.omegas.size(); ++i) {
    Complex alpha = sys.bras[i].dot(psi);
    amps[i] = alpha * std::exp(Complex(0.0, -1.0) * sys.omegas[i] * t);
  }
  return expand_branches(amps, sys.kets);
}

EvolutionResult backward_evolve(const Matrix& h, const Vector& phi_T,
                                double T, double t) {
  if (h.cols() != phi_T.size()) {
    throw std::invalid_argument("backward_evolve: dimension mismatch");
  }
  // the costate <phi(t)| = <phi_T| exp(-i h (T-t)) expands on the left
  // eigenvectors; as a ket it picks up conjugated frequencies
  BiorthogonalSystem sys = biorthogonal(h);
  double tau = T - t;
  std::vector<Complex> amps(sys.omegas.size());
  for (size_t i = 0; i < sys.omegas.size(); ++i) {
    Complex beta = sys.kets[i].dot(phi_T);
    amps[i] = beta * std::exp(Complex(0.0, 1.0) * std::conj(sys.omegas[i]) *
                              tau);
  }
  return expand_branches(amps, sys.bras);
}

std::vector<BranchOutcome> adiabatic_branches(const Matrix& h,
                                              const Vector& psi, double T) {
  BiorthogonalSystem sys = biorthogonal(h);
  std::vector<BranchOutcome> outcomes(sys.omegas.size());
  double total = 0.0;
  for (size_t i = 0; i < sys.omegas.size(); ++i) {
    Complex alpha = sys.bras[i].dot(psi);
    Complex amp = alpha * std::exp(Complex(0.0, -1.0) * sys.omegas[i] * T);
    outcomes[i].omega = sys.omegas[i];
    outcomes[i].probability = std::norm(amp);
    total += outcomes[i].probability;
  }
  if (total < kBranchFloor) {
    throw UnderflowedBranch("adiabatic_branches: all branches underflowed");
  }
  for (BranchOutcome& o : outcomes) o.probability /= total;
  return outcomes;
}

}  // namespace tsvlab
