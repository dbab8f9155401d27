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

#include "tsvlab/protection.hpp"

#include <cmath>
#include <sstream>

namespace tsvlab {

namespace {

// <device|(x)I acting on a joint device(x)system vector: the conditional
// (unnormalized) system vector.
Vector device_project(const Vector& joint, const Vector& device) {
  const Eigen::Index sys_dim = joint.size() / device.size();
  Vector out = Vector::Zero(sys_dim);
  for (Eigen::Index d = 0; d < device.size(); ++d) {
    out += std::conj(device(d)) * joint.segment(d * sys_dim, sys_dim);
  }
  return out;
}

// exp through the segment list restricted to the time window [t_from, t_to];
// exact because the generator is constant within each segment.
Vector propagate_interval(const std::vector<SegmentProp>& props, Vector psi,
                          double t_from, double t_to) {
  double cum = 0.0;
  for (const SegmentProp& seg : props) {
    double a = std::max(t_from, cum);
    double b = std::min(t_to, cum + seg.duration);
    if (b > a) {
      psi = segment_apply(seg, psi, b - a, false);
    }
    cum += seg.duration;
  }
  return psi;
}

Matrix joint_free_hamiltonian(const ProtectionSetup& setup) {
  SpinSystem spin = make_spin(setup.n);
  Matrix h = -setup.lambda * tensor(spin.sx, setup.sigma_triple[0]);
  h += -setup.lambda * tensor(spin.sy, setup.sigma_triple[1]);
  h += -setup.lambda * tensor(spin.sz, setup.sigma_triple[2]);
  return h;
}

}  // namespace

ProtectionSetup::ProtectionSetup(double lambda_, double n_, Direction pre,
                                 Direction post, TwoStateVector tsv,
                                 Direction meas, PointerModel pointer_,
                                 double duration_)
    : lambda(lambda_),
      n(n_),
      pre_dir(pre),
      post_dir(post),
      system_tsv(std::move(tsv)),
      meas_dir(meas),
      pointer(std::move(pointer_)),
      duration(duration_),
      sigma_triple{pauli_x(), pauli_y(), pauli_z()} {
  if (system_tsv.dim() != 2) {
    throw std::invalid_argument(
        "ProtectionSetup: protected system must be two-dimensional");
  }
  if (lambda <= 0.0 || n <= 0.0 || duration <= 0.0) {
    throw std::invalid_argument(
        "ProtectionSetup: lambda, n and duration must be positive");
  }
}

ProtectionSetup standard_setup(double n, double lambda, const Direction& xi,
                               double p_max) {
  if (p_max <= 0.0) {
    throw std::invalid_argument("standard_setup: p_max must be positive");
  }
  double delta = 2.0 / p_max;  // momentum spread p_max / 4
  PointerModel pointer = gaussian_pointer(delta, 1.0);
  TwoStateVector tsv =
      TwoStateVector::make(qubit_up(dir_x()), qubit_up(dir_y()));
  return ProtectionSetup(lambda, n, dir_x(), dir_y(), std::move(tsv), xi,
                         std::move(pointer), 1.0);
}

Matrix build_joint_hamiltonian(const ProtectionSetup& setup, double p) {
  SpinSystem spin = make_spin(setup.n);
  Matrix id_dev = Matrix::Identity(spin.sx.rows(), spin.sx.cols());
  return joint_free_hamiltonian(setup) +
         p * tensor(id_dev, sigma(setup.meas_dir));
}

ProtectedRunRecord protected_run(const ProtectionSetup& setup, int steps) {
  if (steps < 1) {
    throw std::invalid_argument("protected_run: steps must be positive");
  }
  if (std::abs(setup.pointer.T - setup.duration) > 1e-12) {
    throw std::invalid_argument(
        "protected_run: pointer window does not match the run duration");
  }
  SpinSystem spin = make_spin(setup.n);
  const Matrix h0 = joint_free_hamiltonian(setup);
  Matrix id_dev = Matrix::Identity(spin.sx.rows(), spin.sx.cols());
  const Matrix m = tensor(id_dev, sigma(setup.meas_dir));

  const Vector dev_pre = coherent(spin, setup.pre_dir);
  const Vector dev_post = coherent(spin, setup.post_dir);
  const Vector& sys_pre = setup.system_tsv.pre();
  const Vector& sys_post = setup.system_tsv.post();
  const Vector psi0 = tensor(dev_pre, sys_pre);
  // final condition of the backward sweep used by the fidelity check
  const Vector chi_T = tensor(dev_post, sys_post);

  const int n_p = static_cast<int>(setup.pointer.p_samples.size());
  const double dt = setup.duration / steps;
  auto segments = coupling_segments(setup.pointer, steps);

  // conditional system vector per sector: only the device is postselected,
  // the protected system index stays free and is summed in every average
  Matrix amps = Matrix::Zero(n_p, 2);
  // fidelity sums are kept as separate numerators and denominators so the
  // aggregate is weighted by the conditional norm at each slice boundary
  std::vector<std::array<double, 4>> fid(n_p);

  parallel_sectors(n_p, [&](int k) {
    auto props =
        diagonalize_segments(h0, m, setup.pointer.p_samples[k], segments);
    double fnum = 0.0;
    double fden = 0.0;
    Vector final_state;
    propagate_sampled(props, psi0, dt, false,
                      [&](const Vector& state, double) {
                        Vector s = device_project(state, dev_pre);
                        fnum += std::norm(sys_pre.dot(s));
                        fden += s.squaredNorm();
                        final_state = state;
                      });
    amps.row(k) = device_project(final_state, dev_post).transpose();
    double bnum = 0.0;
    double bden = 0.0;
    propagate_sampled(props, chi_T, dt, true,
                      [&](const Vector& state, double) {
                        Vector s = device_project(state, dev_post);
                        bnum += std::norm(sys_post.dot(s));
                        bden += s.squaredNorm();
                      });
    fid[k] = {fnum, fden, bnum, bden};
  });

  double den = 0.0;
  double p_num = 0.0;
  double f_parts[4] = {0.0, 0.0, 0.0, 0.0};
  for (int k = 0; k < n_p; ++k) {
    double w = setup.pointer.weights[k];
    den += w * amps.row(k).squaredNorm();
    p_num += w * setup.pointer.p_samples[k] * amps.row(k).squaredNorm();
    for (int j = 0; j < 4; ++j) f_parts[j] += w * fid[k][j];
  }
  double f_fwd = f_parts[0] / f_parts[1];
  double f_bwd = f_parts[2] / f_parts[3];

  double ideal = std::norm(dev_post.dot(dev_pre));
  if (den < kDeadBranchRel * ideal) {
    std::ostringstream msg;
    msg << "protected_run: conditional weight " << den << " fell below "
        << kDeadBranchRel << " of the ideal weight " << ideal;
    throw DeadBranch(msg.str());
  }

  double dp = setup.pointer.p_samples[1] - setup.pointer.p_samples[0];
  Matrix deriv = five_point_derivative(amps, dp);
  double q_num = 0.0;
  for (int k = 0; k < n_p; ++k) {
    q_num += setup.pointer.weights[k] *
             (-std::imag(amps.row(k).conjugate().cwiseProduct(deriv.row(k))
                             .sum()));
  }

  ProtectedRunRecord out;
  out.record.q_shift_mean = q_num / den;
  out.record.p_shift_mean = p_num / den;
  out.record.postselect_prob = den;
  out.forward_fidelity = f_fwd;
  out.backward_fidelity = f_bwd;
  out.disturbance = 1.0 - f_fwd * f_bwd;

  // coarse rerun of the endpoint amplitudes only; large deviations mean the
  // segment resolution itself is not converged
  out.convergence_delta = 0.0;
  out.convergence_warning = false;
  if (steps >= 2) {
    auto coarse_segments = coupling_segments(setup.pointer, steps / 2);
    Matrix c_grid = Matrix::Zero(n_p, 2);
    parallel_sectors(n_p, [&](int k) {
      auto props = diagonalize_segments(h0, m, setup.pointer.p_samples[k],
                                        coarse_segments);
      c_grid.row(k) =
          device_project(propagate(props, psi0), dev_post).transpose();
    });
    double c_den = 0.0;
    for (int k = 0; k < n_p; ++k) {
      c_den += setup.pointer.weights[k] * c_grid.row(k).squaredNorm();
    }
    Matrix c_deriv = five_point_derivative(c_grid, dp);
    double c_qnum = 0.0;
    for (int k = 0; k < n_p; ++k) {
      c_qnum +=
          setup.pointer.weights[k] *
          (-std::imag(
              c_grid.row(k).conjugate().cwiseProduct(c_deriv.row(k)).sum()));
    }
    out.convergence_delta =
        std::abs(out.record.q_shift_mean - c_qnum / c_den);
    out.convergence_warning = out.convergence_delta > 1e-2;
  }
  return out;
}

double disturbance_probability(double n, double lambda, double p,
                               const Direction& xi,
                               const std::optional<Vector>& initial_system,
                               int steps, int time_samples) {
  if (time_samples < 1 || steps < 1) {
    throw std::invalid_argument(
        "disturbance_probability: steps and time_samples must be positive");
  }
  SpinSystem spin = make_spin(n);
  Matrix h0 = -lambda * (tensor(spin.sx, pauli_x()) +
                         tensor(spin.sy, pauli_y()) +
                         tensor(spin.sz, pauli_z()));
  Matrix id_dev = Matrix::Identity(spin.sx.rows(), spin.sx.cols());
  Matrix m = tensor(id_dev, sigma(xi));
  Vector dev_pre = coherent(spin, dir_x());
  Vector dev_post = coherent(spin, dir_y());
  Vector s0 = initial_system.value_or(qubit_down(dir_y()));
  if (s0.size() != 2) {
    throw std::invalid_argument(
        "disturbance_probability: system state must be two-dimensional");
  }
  s0.normalize();

  const double T = 1.0;
  std::vector<std::pair<double, double>> segments;
  if (p == 0.0) {
    // coupling drops out entirely, one exact segment suffices
    segments.emplace_back(0.0, T);
  } else {
    PointerModel scheduler = gaussian_pointer(1.0, T);
    segments = coupling_segments(scheduler, steps);
  }
  auto props = diagonalize_segments(h0, m, p, segments);

  Vector psi0 = tensor(dev_pre, s0);
  Matrix keep = s0 * s0.adjoint();
  const Eigen::Index sys_dim = 2;
  const Eigen::Index dev_dim = id_dev.rows();

  auto apply_system = [&](const Matrix& op, const Vector& joint) {
    Vector out(joint.size());
    for (Eigen::Index d = 0; d < dev_dim; ++d) {
      out.segment(d * sys_dim, sys_dim) =
          op * joint.segment(d * sys_dim, sys_dim);
    }
    return out;
  };

  double total = 0.0;
  for (int j = 0; j < time_samples; ++j) {
    double t = (j + 0.5) * T / time_samples;
    Vector mid = propagate_interval(props, psi0, 0.0, t);
    Vector kept = apply_system(keep, mid);
    Vector flipped = mid - kept;
    double w_flip =
        device_project(propagate_interval(props, flipped, t, T), dev_post)
            .squaredNorm();
    double w_keep =
        device_project(propagate_interval(props, kept, t, T), dev_post)
            .squaredNorm();
    double norm = w_flip + w_keep;
    if (norm <= 0.0) {
      throw DeadBranch("disturbance_probability: conditional weight vanished");
    }
    total += w_flip / norm;
  }
  return total / time_samples;
}

ModelSpinMap model_spin(const TwoStateVector& tsv) {
  if (tsv.dim() != 2) {
    throw std::invalid_argument("model_spin: pair must be two-dimensional");
  }
  const Vector& psi1 = tsv.pre();
  const Vector& psi2 = tsv.post();
  Complex a = psi1.dot(psi2);
  Vector perp_raw = psi2 - a * psi1;
  Vector perp(2);
  if (perp_raw.norm() < 1e-12) {
    // parallel pair: any completion of the basis works
    perp << -std::conj(psi1(1)), std::conj(psi1(0));
  } else {
    perp = perp_raw.normalized();
  }
  perp = fix_phase(perp);
  Complex b = perp.dot(psi2);

  double nx = 2.0 * std::real(std::conj(a) * b);
  double ny = 2.0 * std::imag(std::conj(a) * b);
  double nz = std::norm(a) - std::norm(b);
  double len = std::sqrt(nx * nx + ny * ny + nz * nz);
  Direction chi(nx / len, ny / len, nz / len);

  Matrix q(2, 2);
  q.col(0) = psi1;
  q.col(1) = perp;
  ModelSpinMap map{
      {psi1, perp},
      a,
      b,
      chi,
      {q * pauli_x() * q.adjoint(), q * pauli_y() * q.adjoint(),
       q * pauli_z() * q.adjoint()}};
  return map;
}

ProtectionSetup model_setup(const ModelSpinMap& map, const TwoStateVector& tsv,
                            double n, double lambda, const Direction& xi,
                            double p_max) {
  double delta = 2.0 / p_max;
  PointerModel pointer = gaussian_pointer(delta, 1.0);
  ProtectionSetup setup(lambda, n, dir_z(), map.chi, tsv, xi,
                        std::move(pointer), 1.0);
  setup.sigma_triple = map.sigma_tilde;
  return setup;
}

TomographyResult sequential_tomography(const ProtectionSetup& setup, int steps,
                                       double reconstruct_tol) {
  if (steps < 15) {
    throw std::invalid_argument(
        "sequential_tomography: need at least 15 steps (5 per window)");
  }
  const int per_window = steps / 3;
  SpinSystem spin = make_spin(setup.n);
  const Matrix h0 = joint_free_hamiltonian(setup);
  Matrix id_dev = Matrix::Identity(spin.sx.rows(), spin.sx.cols());
  const std::array<Matrix, 3> meas = {tensor(id_dev, pauli_x()),
                                      tensor(id_dev, pauli_y()),
                                      tensor(id_dev, pauli_z())};

  const Vector dev_pre = coherent(spin, setup.pre_dir);
  const Vector dev_post = coherent(spin, setup.post_dir);
  const Vector psi0 = tensor(dev_pre, setup.system_tsv.pre());

  const int n_p = static_cast<int>(setup.pointer.p_samples.size());
  const std::vector<double>& ps = setup.pointer.p_samples;
  const std::vector<double>& ws = setup.pointer.weights;
  PointerModel sub = gaussian_pointer(setup.pointer.delta,
                                      setup.duration / 3.0,
                                      Schedule::flat_with_ramps, n_p);
  auto segments = coupling_segments(sub, per_window);
  const Eigen::Index sys_dim = 2;

  // window 1: one propagated state per first-pointer momentum
  std::vector<Vector> stage1(n_p);
  parallel_sectors(n_p, [&](int k1) {
    auto props = diagonalize_segments(h0, meas[0], ps[k1], segments);
    stage1[k1] = propagate(props, psi0);
  });

  // window 2: all combinations, reusing one diagonalization per k2
  std::vector<Vector> stage2(static_cast<size_t>(n_p) * n_p);
  parallel_sectors(n_p, [&](int k2) {
    auto props = diagonalize_segments(h0, meas[1], ps[k2], segments);
    for (int k1 = 0; k1 < n_p; ++k1) {
      stage2[static_cast<size_t>(k2) * n_p + k1] =
          propagate(props, stage1[k1]);
    }
  });

  // window 3 enters through adjoint rows: <post, s| U3(p) as kets
  std::vector<std::array<Vector, 2>> rows3(n_p);
  parallel_sectors(n_p, [&](int k3) {
    auto props = diagonalize_segments(h0, meas[2], ps[k3], segments);
    for (int s = 0; s < 2; ++s) {
      Vector basis_s = Vector::Zero(sys_dim);
      basis_s(s) = 1.0;
      rows3[k3][s] = propagate(props, tensor(dev_post, basis_s), true);
    }
  });

  // conditional amplitudes over the three momentum grids; the device is
  // postselected in window 3 while the system index s stays free
  std::vector<std::array<Complex, 2>> v(static_cast<size_t>(n_p) * n_p * n_p);
  parallel_sectors(n_p, [&](int k2) {
    for (int k1 = 0; k1 < n_p; ++k1) {
      const Vector& mid = stage2[static_cast<size_t>(k2) * n_p + k1];
      for (int k3 = 0; k3 < n_p; ++k3) {
        v[(static_cast<size_t>(k2) * n_p + k1) * n_p + k3] = {
            rows3[k3][0].dot(mid), rows3[k3][1].dot(mid)};
      }
    }
  });

  auto idx = [n_p](int k2, int k1, int k3) {
    return (static_cast<size_t>(k2) * n_p + k1) * n_p + k3;
  };

  double den = 0.0;
  for (int k2 = 0; k2 < n_p; ++k2) {
    for (int k1 = 0; k1 < n_p; ++k1) {
      for (int k3 = 0; k3 < n_p; ++k3) {
        const auto& amp = v[idx(k2, k1, k3)];
        den += ws[k1] * ws[k2] * ws[k3] *
               (std::norm(amp[0]) + std::norm(amp[1]));
      }
    }
  }
  if (den <= 0.0) {
    throw DeadBranch("sequential_tomography: conditional weight vanished");
  }

  double dp = ps[1] - ps[0];
  double sigma_p = pointer_sigma_p(setup.pointer);
  std::array<Complex, 3> estimates;

  for (int axis = 0; axis < 3; ++axis) {
    Matrix rows(n_p, n_p * n_p * 2);
    for (int k2 = 0; k2 < n_p; ++k2) {
      for (int k1 = 0; k1 < n_p; ++k1) {
        for (int k3 = 0; k3 < n_p; ++k3) {
          int row = axis == 0 ? k1 : axis == 1 ? k2 : k3;
          int col = axis == 0 ? k2 * n_p + k3
                    : axis == 1 ? k1 * n_p + k3
                                : k2 * n_p + k1;
          const auto& amp = v[idx(k2, k1, k3)];
          rows(row, 2 * col) = amp[0];
          rows(row, 2 * col + 1) = amp[1];
        }
      }
    }
    Matrix deriv = five_point_derivative(rows, dp);
    double q_num = 0.0;
    double p_num = 0.0;
    for (int k2 = 0; k2 < n_p; ++k2) {
      for (int k1 = 0; k1 < n_p; ++k1) {
        for (int k3 = 0; k3 < n_p; ++k3) {
          double w = ws[k1] * ws[k2] * ws[k3];
          int row = axis == 0 ? k1 : axis == 1 ? k2 : k3;
          int col = axis == 0 ? k2 * n_p + k3
                    : axis == 1 ? k1 * n_p + k3
                                : k2 * n_p + k1;
          for (int s = 0; s < 2; ++s) {
            Complex amp = rows(row, 2 * col + s);
            q_num += w * (-std::imag(std::conj(amp) * deriv(row, 2 * col + s)));
            p_num += w * ps[row] * std::norm(amp);
          }
        }
      }
    }
    estimates[axis] =
        Complex(q_num / den, (p_num / den) / (2.0 * sigma_p * sigma_p));
  }

  TwoStateVector rec = reconstruct_qubit_tsv(estimates[0], estimates[1],
                                             estimates[2], reconstruct_tol);
  Matrix t_meas = 0.5 * (pauli_id() + estimates[0] * pauli_x() +
                         estimates[1] * pauli_y() + estimates[2] * pauli_z());
  Matrix t_model = (rec.pre() * rec.post().adjoint()) / rec.overlap();
  double residual = (t_meas - t_model).cwiseAbs().maxCoeff();

  return TomographyResult{estimates, std::move(rec), residual, den};
}

}  // namespace tsvlab
