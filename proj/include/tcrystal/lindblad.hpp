// Copyright 2026 The tcrystal Authors
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

// GKSL master equation
//   d rho/dt = -i[H, rho] + sum_k r_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2)
// in column-stacking vectorized form.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tcrystal/collision.hpp"
#include "tcrystal/kernel.hpp"
#include "tcrystal/models.hpp"
#include "tcrystal/record.hpp"
#include "tcrystal/tensor.hpp"

namespace tcrystal {

struct Jump {
  ComplexMatrix op;
  double rate = 0.0;
};

struct LindbladSpec {
  ComplexMatrix hamiltonian;
  std::vector<Jump> jumps;

  void validate(double tol = kHermitianTol) const {
    require_hermitian(hamiltonian, tol, "LindbladSpec");
    for (const auto& j : jumps) {
      if (j.op.rows() != hamiltonian.rows() || j.op.cols() != hamiltonian.cols())
        throw DimensionError("LindbladSpec: jump operator dimension mismatch");
      if (!(j.rate >= 0.0) || !std::isfinite(j.rate))
        throw InvalidArgument("LindbladSpec: rates must be finite and non-negative");
    }
  }

  Index dim() const { return hamiltonian.rows(); }
};

struct Liouvillian {
  Index dim = 0;         // D
  ComplexMatrix matrix;  // D^2 x D^2
};

inline Liouvillian build_liouvillian(const LindbladSpec& spec) {
  spec.validate();
  const Index d = spec.dim();
  const ComplexMatrix id = identity(d);
  const ComplexMatrix& h = spec.hamiltonian;
  // vec(H rho) = (I (x) H) vec(rho); vec(rho H) = (H^T (x) I) vec(rho)
  ComplexMatrix l = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& j : spec.jumps) {
    if (j.rate == 0.0) continue;
    const ComplexMatrix ldl = j.op.adjoint() * j.op;
    l += j.rate * (kron(j.op.conjugate(), j.op) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
  }
  return {d, std::move(l)};
}

/// Right-hand side evaluated directly on the matrix.
inline ComplexMatrix lindblad_rhs(const LindbladSpec& spec, const ComplexMatrix& rho) {
  ComplexMatrix out = -kI * (spec.hamiltonian * rho - rho * spec.hamiltonian);
  for (const auto& j : spec.jumps) {
    if (j.rate == 0.0) continue;
    const ComplexMatrix ldl = j.op.adjoint() * j.op;
    out += j.rate * (j.op * rho * j.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

/// Bose occupation 1 / (e^{beta w} - 1); zero at beta = infinity.
inline double thermal_occupation(double beta, double splitting) {
  if (std::isnan(beta) || beta < 0.0) throw InvalidArgument("thermal_occupation: beta must be >= 0");
  if (std::isinf(beta)) return 0.0;
  const double x = beta * splitting;
  if (!(x > 0.0)) throw InvalidArgument("thermal_occupation: beta * splitting must be > 0");
  return 1.0 / std::expm1(x);
}

/// Thermal damping of qubit 1: decay_jump() at Gamma (n + 1) and, when
/// n > 0, excitation_jump() at Gamma n.
inline LindbladSpec gksl_spec(const SpinModel& model, double gamma, double n_bar) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gksl_spec: Gamma must be > 0");
  if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) throw InvalidArgument("gksl_spec: n_bar must be >= 0");
  LindbladSpec spec{hamiltonian(model), {}};
  const int n = model.n_qubits;
  spec.jumps.push_back({embed(decay_jump(), 1, n), gamma * (n_bar + 1.0)});
  if (n_bar > 0.0) spec.jumps.push_back({embed(excitation_jump(), 1, n), gamma * n_bar});
  return spec;
}

inline std::vector<Complex> liouvillian_eigenvalues(const Liouvillian& l) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(l.matrix, false);
  if (es.info() != Eigen::Success) throw NumericalError("liouvillian_eigenvalues: eigensolver failed");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
  });
  return ev;
}

/// Kernel of L: Hermitian orthonormal basis plus the canonical steady state,
/// the projection of the maximally mixed state onto the kernel.
inline StationarySpace steady_space(const Liouvillian& l, double tol = 1e-8) {
  return stationary_space(l.matrix, l.dim, tol);
}

/// Smallest nonzero decay rate: -max{Re mu : Re mu < -tol}.
inline double liouvillian_gap(const Liouvillian& l, double tol = 1e-8) {
  double best = -std::numeric_limits<double>::infinity();
  for (Complex mu : liouvillian_eigenvalues(l))
    if (mu.real() < -tol) best = std::max(best, mu.real());
  if (std::isinf(best)) throw NumericalError("liouvillian_gap: no eigenvalue with negative real part");
  return -best;
}

enum class Propagator { automatic, exact, rk4 };

/// Propagates rho0 over `t_grid` (increasing, starting at 0) and records the
/// observables at every grid point. The exact path applies exp(L dt) and is
/// chosen automatically for D <= 32; otherwise fixed-step RK4 on the matrix
/// equation.
inline TrajectoryRecord evolve(const LindbladSpec& spec, const DensityMatrix& rho0,
                               std::span<const double> t_grid,
                               const std::vector<Observable>& observables,
                               Propagator method = Propagator::automatic,
                               const std::function<void(double, const ComplexMatrix&)>& on_step = {}) {
  spec.validate();
  const Index d = spec.dim();
  if (rho0.dim() != d) throw DimensionError("evolve: initial state has the wrong dimension");
  if (t_grid.empty() || t_grid.front() != 0.0) throw InvalidArgument("evolve: grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("evolve: grid must be strictly increasing");
  detail::check_observables(observables, d);
  if (method == Propagator::automatic) method = d <= 32 ? Propagator::exact : Propagator::rk4;

  TrajectoryRecord rec = make_record(observables);
  rec.engine = "lindblad";
  rec.config = {{"dim", d},
                {"jumps", spec.jumps.size()},
                {"propagator", method == Propagator::exact ? "exact" : "rk4"},
                {"t_final", t_grid.back()}};

  ComplexMatrix rho = rho0.matrix();
  rec.push(0.0, detail::expectations(observables, rho));

  if (method == Propagator::exact) {
    const Liouvillian l = build_liouvillian(spec);
    double cached_dt = -1.0;
    ComplexMatrix step;
    ComplexVector v = vec(rho);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const double dt = t_grid[i] - t_grid[i - 1];
      // Grid spacings that agree to roundoff share one propagator.
      if (std::abs(dt - cached_dt) > 1e-12 * dt) {
        step = expm_general(l.matrix * dt);
        cached_dt = dt;
      }
      v = step * v;
      rho = unvec(v, d);
      rec.push(t_grid[i], detail::expectations(observables, rho));
      if (on_step) on_step(t_grid[i], rho);
    }
    return rec;
  }

  // Bound on the generator norm sets the RK4 step.
  double bound = 2.0 * spec.hamiltonian.norm();
  for (const auto& j : spec.jumps) bound += 2.0 * j.rate * j.op.squaredNorm();
  const double h_max = 1e-2 / std::max(bound, 1e-12);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t_grid[i - 1];
    const int steps = std::max(1, static_cast<int>(std::ceil(dt / h_max)));
    const double h = dt / steps;
    for (int s = 0; s < steps; ++s) {
      const ComplexMatrix k1 = lindblad_rhs(spec, rho);
      const ComplexMatrix k2 = lindblad_rhs(spec, rho + 0.5 * h * k1);
      const ComplexMatrix k3 = lindblad_rhs(spec, rho + 0.5 * h * k2);
      const ComplexMatrix k4 = lindblad_rhs(spec, rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    rec.push(t_grid[i], detail::expectations(observables, rho));
    if (on_step) on_step(t_grid[i], rho);
  }
  return rec;
}

/// Evenly spaced grid 0, dt, ..., up to and including t_final (rounded to
/// the nearest whole number of steps).
inline std::vector<double> uniform_grid(double t_final, double dt) {
  if (!(t_final > 0.0) || !(dt > 0.0)) throw InvalidArgument("uniform_grid: t_final and dt must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(t_final / dt));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = static_cast<double>(i) * dt;
  return g;
}

}  // namespace tcrystal
