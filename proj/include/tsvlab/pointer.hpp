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

// Measuring-device (pointer) models and the measurement interactions built
// on them.  A Gaussian pointer of width delta is represented by a discrete
// grid of momentum eigenvalues with Gaussian weights; the interaction
// H_int = g(t) p A is diagonal in that grid, so each momentum value evolves
// in its own sector.  Sector sweeps are OpenMP-parallel with a serial
// ordered reduction, which keeps results bitwise independent of the thread
// count.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tsvlab/hilbert.hpp"
#include "tsvlab/spin.hpp"
#include "tsvlab/tsv.hpp"

namespace tsvlab {

enum class Schedule {
  impulsive,        // delta-kick, integral of g concentrated at one instant
  flat_with_ramps,  // raised-cosine ramps into a flat plateau, integral 1
};

std::string schedule_name(Schedule s);

// Discrete Gaussian pointer.  q_mean is the initial pointer position, delta
// the position spread; momentum spread is 1/(2 delta).  p_samples holds the
// momentum grid (uniform over +-4 momentum spreads) and weights holds the
// normalized Gaussian weights of the initial pointer wavefunction squared.
struct PointerModel {
  double q_mean;
  double delta;
  std::vector<double> p_samples;
  std::vector<double> weights;
  double T;  // total coupling duration
  Schedule schedule;
  double ramp_fraction;  // fraction of T spent in each ramp
};

// Standard pointer with uniform momentum grid on [-2/delta, 2/delta].
PointerModel gaussian_pointer(double delta, double T = 1.0,
                              Schedule schedule = Schedule::flat_with_ramps,
                              int samples = 33);

double pointer_p_max(const PointerModel& pointer);
double pointer_sigma_p(const PointerModel& pointer);

// Coupling profile g(t) on [0, T]; integrates to 1 for flat_with_ramps.
double coupling_at(const PointerModel& pointer, double t);

// Midpoint samples of g over `steps` uniform slices, with runs of equal
// coupling merged.  Each entry is (g, slice duration * run length).
std::vector<std::pair<double, double>> coupling_segments(
    const PointerModel& pointer, int steps);

// One merged segment of H(t) = h0 + g p m, diagonalized once.
struct SegmentProp {
  double coupling;
  double duration;
  Eigen::VectorXd evals;
  Matrix evecs;
};

// Diagonalize h0 + g p m per segment.  h0 and m must be Hermitian.
std::vector<SegmentProp> diagonalize_segments(
    const Matrix& h0, const Matrix& m, double p,
    const std::vector<std::pair<double, double>>& segments);

// exp(-i h tau) psi (or the inverse for adjoint) within one segment.
Vector segment_apply(const SegmentProp& seg, const Vector& psi, double tau,
                     bool adjoint = false);

// Apply the time-ordered product of segment propagators.  adjoint=true
// applies the inverse evolution (segments reversed, conjugated phases).
Vector propagate(const std::vector<SegmentProp>& segments, Vector psi,
                 bool adjoint = false);

// As propagate, but calls visit(state, t) at every slice boundary from the
// starting state (t = 0, or t = T for the adjoint sweep) to the final one.
void propagate_sampled(const std::vector<SegmentProp>& segments, Vector psi,
                       double dt, bool adjoint,
                       const std::function<void(const Vector&, double)>& visit);

// OpenMP map over sector indices 0..n-1.  Each body call writes only its own
// preallocated slot; callers reduce serially in index order afterwards.
void parallel_sectors(int n, const std::function<void(int)>& body);

// Five-point central first derivative along a uniform grid with spacing h,
// one-sided stencils at the edges.  One row per grid point.
Matrix five_point_derivative(const Matrix& rows, double h);

// Outcome statistics of one measurement interaction.
struct MeasurementRecord {
  double q_shift_mean;
  double p_shift_mean;
  // (pointer center, weight) per distinguishable outcome; empty when the
  // interaction does not resolve discrete outcomes.
  std::vector<std::pair<double, double>> outcome_distribution;
  double postselect_prob;
};

// Impulsive strong measurement of a on psi: the pointer splits into one
// Gaussian per eigenvalue, centered at q_mean + eigenvalue with the Born
// weight.  Requires Hermitian a.
MeasurementRecord impulsive_measure(const Matrix& a, const Vector& psi,
                                    const PointerModel& pointer);

// Weakly coupled pointer on a pre- and postselected pair: evolve
// exp(-i s p a) per momentum sector, postselect, and read the pointer
// shifts off the conditional amplitudes.  First order in s the position
// shift is s Re(w) and the momentum shift 2 sigma_p^2 s Im(w) for
// conditional value w.
MeasurementRecord weak_measure_tsv(const Matrix& a, const TwoStateVector& tsv,
                                   const PointerModel& pointer,
                                   double strength);

struct AdiabaticRecord {
  MeasurementRecord record;
  double leakage;            // final weight outside the tracked eigenbranch
  bool convergence_warning;  // halving the step count moved the shift
  double convergence_delta;  // size of that movement
};

// Slow measurement of a on an eigenstate psi0 of h0: couple g(t) p a over
// [0, T] per momentum sector and track the adiabatic branch.  psi0 must be
// an eigenstate of h0 (residual below 1e-8), otherwise std::invalid_argument.
AdiabaticRecord adiabatic_measure_single(const Matrix& h0, const Matrix& a,
                                         const Vector& psi0,
                                         const PointerModel& pointer,
                                         int steps);

}  // namespace tsvlab
