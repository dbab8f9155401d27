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

#include "tsvlab/pointer.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tsvlab {

std::string schedule_name(Schedule s) {
  switch (s) {
    case Schedule::impulsive:
      return "impulsive";
    case Schedule::flat_with_ramps:
      return "flat_with_ramps";
  }
  return "unknown";
}

PointerModel gaussian_pointer(double delta, double T, Schedule schedule,
                              int samples) {
  if (delta <= 0.0) {
    throw std::invalid_argument("gaussian_pointer: delta must be positive");
  }
  if (T <= 0.0) {
    throw std::invalid_argument("gaussian_pointer: T must be positive");
  }
  if (samples < 5 || samples % 2 == 0) {
    throw std::invalid_argument(
        "gaussian_pointer: need an odd sample count of at least 5");
  }
  double sigma_p = 1.0 / (2.0 * delta);
  double p_max = 4.0 * sigma_p;
  int center = (samples - 1) / 2;
  double dp = p_max / center;
  PointerModel pointer;
  pointer.q_mean = 0.0;
  pointer.delta = delta;
  pointer.T = T;
  pointer.schedule = schedule;
  pointer.ramp_fraction = schedule == Schedule::flat_with_ramps ? 0.1 : 0.0;
  pointer.p_samples.resize(samples);
  pointer.weights.resize(samples);
  double total = 0.0;
  for (int k = 0; k < samples; ++k) {
    double p = dp * (k - center);  // exactly antisymmetric grid
    pointer.p_samples[k] = p;
    double w = std::exp(-p * p / (2.0 * sigma_p * sigma_p));
    pointer.weights[k] = w;
    total += w;
  }
  for (double& w : pointer.weights) w /= total;
  return pointer;
}

double pointer_p_max(const PointerModel& pointer) {
  double m = 0.0;
  for (double p : pointer.p_samples) m = std::max(m, std::abs(p));
  return m;
}

double pointer_sigma_p(const PointerModel& pointer) {
  return 1.0 / (2.0 * pointer.delta);
}

double coupling_at(const PointerModel& pointer, double t) {
  if (pointer.schedule == Schedule::impulsive) return 0.0;
  if (t < 0.0 || t > pointer.T) return 0.0;
  double f = pointer.ramp_fraction;
  double ramp = f * pointer.T;
  double g0 = 1.0 / (pointer.T * (1.0 - f));
  if (t < ramp) {
    return g0 * 0.5 * (1.0 - std::cos(std::numbers::pi * t / ramp));
  }
  if (t > pointer.T - ramp) {
    return g0 * 0.5 *
           (1.0 - std::cos(std::numbers::pi * (pointer.T - t) / ramp));
  }
  return g0;
}

std::vector<std::pair<double, double>> coupling_segments(
    const PointerModel& pointer, int steps) {
  if (steps < 1) {
    throw std::invalid_argument("coupling_segments: steps must be positive");
  }
  double dt = pointer.T / steps;
  std::vector<std::pair<double, double>> segments;
  for (int k = 0; k < steps; ++k) {
    double g = coupling_at(pointer, (k + 0.5) * dt);
    // plateau midpoints evaluate to the identical double, so exact
    // comparison merges the flat run into one segment
    if (!segments.empty() && segments.back().first == g) {
      segments.back().second += dt;
    } else {
      segments.emplace_back(g, dt);
    }
  }
  return segments;
}

std::vector<SegmentProp> diagonalize_segments(
    const Matrix& h0, const Matrix& m, double p,
    const std::vector<std::pair<double, double>>& segments) {
  std::vector<SegmentProp> props;
  props.reserve(segments.size());
  for (const auto& [g, duration] : segments) {
    Matrix h = h0 + (g * p) * m;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("diagonalize_segments: eigensolver failed");
    }
    props.push_back(SegmentProp{g, duration, es.eigenvalues(),
                                es.eigenvectors()});
  }
  return props;
}

Vector segment_apply(const SegmentProp& seg, const Vector& psi, double tau,
                     bool adjoint) {
  Vector hat = seg.evecs.adjoint() * psi;
  double sign = adjoint ? 1.0 : -1.0;
  for (Eigen::Index k = 0; k < hat.size(); ++k) {
    hat(k) *= std::exp(Complex(0.0, sign * seg.evals(k) * tau));
  }
  return seg.evecs * hat;
}

Vector propagate(const std::vector<SegmentProp>& segments, Vector psi,
                 bool adjoint) {
  if (!adjoint) {
    for (const SegmentProp& seg : segments) {
      psi = segment_apply(seg, psi, seg.duration, false);
    }
  } else {
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
      psi = segment_apply(*it, psi, it->duration, true);
    }
  }
  return psi;
}

void propagate_sampled(const std::vector<SegmentProp>& segments, Vector psi,
                       double dt, bool adjoint,
                       const std::function<void(const Vector&, double)>& visit) {
  double total = 0.0;
  for (const SegmentProp& seg : segments) total += seg.duration;
  double t = adjoint ? total : 0.0;
  visit(psi, t);
  auto run_segment = [&](const SegmentProp& seg) {
    auto slices = static_cast<long>(std::llround(seg.duration / dt));
    Vector hat = seg.evecs.adjoint() * psi;
    double sign = adjoint ? 1.0 : -1.0;
    Vector phases(hat.size());
    for (Eigen::Index k = 0; k < hat.size(); ++k) {
      phases(k) = std::exp(Complex(0.0, sign * seg.evals(k) * dt));
    }
    for (long s = 0; s < slices; ++s) {
      hat = phases.cwiseProduct(hat).eval();
      psi = seg.evecs * hat;
      t += adjoint ? -dt : dt;
      visit(psi, t);
    }
  };
  if (!adjoint) {
    for (const SegmentProp& seg : segments) run_segment(seg);
  } else {
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
      run_segment(*it);
    }
  }
}

void parallel_sectors(int n, const std::function<void(int)>& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) {
    body(i);
  }
}

Matrix five_point_derivative(const Matrix& rows, double h) {
  const Eigen::Index n = rows.rows();
  if (n < 5) {
    throw std::invalid_argument(
        "five_point_derivative: need at least 5 grid points");
  }
  Matrix out(n, rows.cols());
  const double inv12h = 1.0 / (12.0 * h);
  out.row(0) = (-25.0 * rows.row(0) + 48.0 * rows.row(1) -
                36.0 * rows.row(2) + 16.0 * rows.row(3) - 3.0 * rows.row(4)) *
               inv12h;
  out.row(1) = (-3.0 * rows.row(0) - 10.0 * rows.row(1) + 18.0 * rows.row(2) -
                6.0 * rows.row(3) + rows.row(4)) *
               inv12h;
  for (Eigen::Index i = 2; i < n - 2; ++i) {
    out.row(i) = (rows.row(i - 2) - 8.0 * rows.row(i - 1) +
                  8.0 * rows.row(i + 1) - rows.row(i + 2)) *
                 inv12h;
  }
  out.row(n - 2) = (3.0 * rows.row(n - 1) + 10.0 * rows.row(n - 2) -
                    18.0 * rows.row(n - 3) + 6.0 * rows.row(n - 4) -
                    rows.row(n - 5)) *
                   inv12h;
  out.row(n - 1) = (25.0 * rows.row(n - 1) - 48.0 * rows.row(n - 2) +
                    36.0 * rows.row(n - 3) - 16.0 * rows.row(n - 4) +
                    3.0 * rows.row(n - 5)) *
                   inv12h;
  return out;
}

MeasurementRecord impulsive_measure(const Matrix& a, const Vector& psi,
                                    const PointerModel& pointer) {
  if (!is_hermitian(a)) {
    throw std::invalid_argument("impulsive_measure: observable not Hermitian");
  }
  if (a.rows() != psi.size()) {
    throw std::invalid_argument("impulsive_measure: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  MeasurementRecord record;
  record.postselect_prob = 1.0;
  record.p_shift_mean = 0.0;
  double mean = 0.0;
  // group (numerically) repeated eigenvalues into one outcome
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    double value = es.eigenvalues()(k);
    double weight = std::norm(es.eigenvectors().col(k).dot(psi));
    mean += value * weight;
    if (!record.outcome_distribution.empty() &&
        std::abs(record.outcome_distribution.back().first -
                 (pointer.q_mean + value)) < 1e-10) {
      record.outcome_distribution.back().second += weight;
    } else {
      record.outcome_distribution.emplace_back(pointer.q_mean + value, weight);
    }
  }
  record.q_shift_mean = mean;
  return record;
}

MeasurementRecord weak_measure_tsv(const Matrix& a, const TwoStateVector& tsv,
                                   const PointerModel& pointer,
                                   double strength) {
  if (!is_hermitian(a)) {
    throw std::invalid_argument("weak_measure_tsv: observable not Hermitian");
  }
  if (a.rows() != tsv.dim()) {
    throw std::invalid_argument("weak_measure_tsv: dimension mismatch");
  }
  MeasurementRecord record;
  record.outcome_distribution.clear();
  if (strength == 0.0) {
    record.q_shift_mean = 0.0;
    record.p_shift_mean = 0.0;
    record.postselect_prob = postselect_probability(tsv);
    return record;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Vector pre_hat = es.eigenvectors().adjoint() * tsv.pre();
  Vector post_hat = es.eigenvectors().adjoint() * tsv.post();
  const int n = static_cast<int>(pointer.p_samples.size());
  double den = 0.0;
  double q_num = 0.0;
  double p_num = 0.0;
  for (int k = 0; k < n; ++k) {
    double p = pointer.p_samples[k];
    double w = pointer.weights[k];
    Complex v(0.0, 0.0);
    Complex dv(0.0, 0.0);  // analytic d/dp of the conditional amplitude
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      Complex term = std::conj(post_hat(i)) * pre_hat(i) *
                     std::exp(Complex(0.0, -strength * p * es.eigenvalues()(i)));
      v += term;
      dv += Complex(0.0, -strength * es.eigenvalues()(i)) * term;
    }
    double prob = std::norm(v);
    den += w * prob;
    q_num += w * (-std::imag(std::conj(v) * dv));
    p_num += w * p * prob;
  }
  if (den <= 0.0) {
    throw DeadBranch("weak_measure_tsv: conditional weight vanished");
  }
  record.q_shift_mean = q_num / den;
  record.p_shift_mean = p_num / den;
  record.postselect_prob = den;
  return record;
}

AdiabaticRecord adiabatic_measure_single(const Matrix& h0, const Matrix& a,
                                         const Vector& psi0,
                                         const PointerModel& pointer,
                                         int steps) {
  if (!is_hermitian(h0) || !is_hermitian(a)) {
    throw std::invalid_argument(
        "adiabatic_measure_single: operators must be Hermitian");
  }
  if (h0.rows() != psi0.size() || a.rows() != psi0.size()) {
    throw std::invalid_argument("adiabatic_measure_single: dimension mismatch");
  }
  Vector psi = psi0.normalized();
  Complex e0 = psi.dot(h0 * psi);
  double resid = (h0 * psi - e0 * psi).norm();
  if (resid > 1e-8) {
    std::ostringstream msg;
    msg << "adiabatic_measure_single: initial state is not an eigenstate "
           "(residual "
        << resid << ")";
    throw std::invalid_argument(msg.str());
  }

  const int n = static_cast<int>(pointer.p_samples.size());
  auto sweep = [&](int step_count, double* leakage_out) {
    auto segments = coupling_segments(pointer, step_count);
    std::vector<Complex> amps(n);
    std::vector<double> survive(n);
    parallel_sectors(n, [&](int k) {
      auto props =
          diagonalize_segments(h0, a, pointer.p_samples[k], segments);
      Vector evolved = propagate(props, psi);
      amps[k] = psi.dot(evolved);
      survive[k] = std::norm(amps[k]);
    });
    double den = 0.0;
    double leak = 0.0;
    for (int k = 0; k < n; ++k) {
      den += pointer.weights[k] * survive[k];
      leak += pointer.weights[k] * (1.0 - survive[k]);
    }
    Matrix grid(n, 1);
    for (int k = 0; k < n; ++k) grid(k, 0) = amps[k];
    double dp = pointer.p_samples[1] - pointer.p_samples[0];
    Matrix deriv = five_point_derivative(grid, dp);
    double q_num = 0.0;
    double p_num = 0.0;
    for (int k = 0; k < n; ++k) {
      q_num += pointer.weights[k] *
               (-std::imag(std::conj(grid(k, 0)) * deriv(k, 0)));
      p_num += pointer.weights[k] * pointer.p_samples[k] * survive[k];
    }
    if (leakage_out != nullptr) *leakage_out = leak;
    MeasurementRecord rec;
    rec.q_shift_mean = q_num / den;
    rec.p_shift_mean = p_num / den;
    rec.postselect_prob = den;
    return rec;
  };

  AdiabaticRecord out;
  out.record = sweep(steps, &out.leakage);
  double coarse_leak = 0.0;
  MeasurementRecord coarse =
      steps >= 2 ? sweep(steps / 2, &coarse_leak) : out.record;
  out.convergence_delta = std::abs(out.record.q_shift_mean -
                                   coarse.q_shift_mean);
  out.convergence_warning = out.convergence_delta > 1e-6;
  return out;
}

}  // namespace tsvlab
