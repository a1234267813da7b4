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

// Repeated-interaction (collision model) dynamics.
//
// Qubit 1 of the system meets a fresh auxiliary qubit after each random
// waiting time theta ~ gamma e^{-gamma theta}. One step is free evolution
// U_S(theta) followed by the joint unitary exp[-i tau (H_S + H_int)] and a
// partial trace over the auxiliary qubit. The auxiliary qubit is the last
// tensor factor of the joint space.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "tcrystal/kernel.hpp"
#include "tcrystal/models.hpp"
#include "tcrystal/record.hpp"
#include "tcrystal/rng.hpp"
#include "tcrystal/tensor.hpp"

namespace tcrystal {

struct BathConfig {
  double beta = std::numeric_limits<double>::infinity();
  double ancilla_field = 1.0;  // level splitting entering tanh(beta B_A / 2)
  double tau = 0.5;
  double gamma = 1.0;
  bool include_ancilla_hamiltonian = false;

  void validate() const {
    if (std::isnan(beta) || beta < 0.0) throw InvalidArgument("BathConfig: beta must be >= 0");
    if (!std::isfinite(ancilla_field)) throw InvalidArgument("BathConfig: ancilla_field must be finite");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("BathConfig: tau must be > 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("BathConfig: gamma must be > 0");
  }

  /// Set when gamma * tau is not small, i.e. collisions may overlap in a
  /// physical bath. Reported, never enforced.
  std::optional<std::string> weak_coupling_warning(double threshold = 0.1) const {
    const double g = gamma * tau;
    if (g < threshold) return std::nullopt;
    return "gamma*tau = " + format_double(g) +
           " is not << 1; collisions are assumed instantaneous relative to the waiting time";
  }
};

inline nlohmann::json to_json(const BathConfig& b) {
  return {{"beta", std::isinf(b.beta) ? nlohmann::json("inf") : nlohmann::json(b.beta)},
          {"ancilla_field", b.ancilla_field},
          {"tau", b.tau},
          {"gamma", b.gamma},
          {"include_ancilla_hamiltonian", b.include_ancilla_hamiltonian}};
}

inline nlohmann::json to_json(const SpinModel& m) {
  return {{"kind", std::string(to_string(m.kind))},
          {"n_qubits", m.n_qubits},
          {"J", m.coupling},
          {"B", m.field},
          {"periodic", m.periodic},
          {"delta", m.delta}};
}

// ---------------------------------------------------------------------------
// Elementary pieces

/// Exponential variate with rate gamma.
inline double sample_waiting_time(CounterRng& rng, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("sample_waiting_time: gamma must be > 0");
  return -std::log(rng.uniform()) / gamma;
}

/// (1/2)(sx (x) sx + sy (x) sy) on (system qubit 1, auxiliary qubit).
inline ComplexMatrix interaction_hamiltonian() {
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  detail::add_flip_flop(h, 1, 2, 2, 0.5);
  return h;
}

/// exp[-i tau (H_S (x) I + H_int on (1, N+1))]. With a finite
/// `ancilla_field` the auxiliary free Hamiltonian -B_A sz is added too.
inline ComplexMatrix collision_unitary(const ComplexMatrix& system_h, double tau,
                                       std::optional<double> ancilla_field = std::nullopt) {
  require_hermitian(system_h, kHermitianTol, "collision_unitary");
  const int n = qubit_count_for(system_h.rows());
  if (n < 1) throw DimensionError("collision_unitary: system dimension is not a power of two");
  ComplexMatrix h = kron(system_h, identity(2));
  detail::add_flip_flop(h, 1, n + 1, n + 1, 0.5);
  if (ancilla_field) h -= *ancilla_field * embed(pauli(PauliAxis::z), n + 1, n + 1);
  return expm_unitary(h, tau);
}

namespace detail {

// Tr_A of a (D*2) x (D*2) operator with the auxiliary qubit last.
inline ComplexMatrix trace_out_last_qubit(const ComplexMatrix& m) {
  const Index d = m.rows() / 2;
  ComplexMatrix out(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out(i, j) = m(2 * i, 2 * j) + m(2 * i + 1, 2 * j + 1);
  return out;
}

// <b|_A W |a>_A as a D x D block of a (2D) x (2D) operator.
inline ComplexMatrix ancilla_block(const ComplexMatrix& w, Index b, Index a) {
  const Index d = w.rows() / 2;
  ComplexMatrix out(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) out(i, j) = w(2 * i + b, 2 * j + a);
  return out;
}

}  // namespace detail

/// Tr_A[U (rho_S (x) rho_A) U^dagger].
inline DensityMatrix apply_collision(const DensityMatrix& rho_s, const DensityMatrix& rho_a,
                                     const ComplexMatrix& u) {
  if (rho_a.dim() != 2) throw DimensionError("apply_collision: auxiliary state must be one qubit");
  if (u.rows() != u.cols() || u.rows() != 2 * rho_s.dim())
    throw DimensionError("apply_collision: unitary does not act on system (x) auxiliary");
  const ComplexMatrix joint = u * kron(rho_s.matrix(), rho_a.matrix()) * u.adjoint();
  ComplexMatrix out = detail::trace_out_last_qubit(joint);
  out = (out + out.adjoint()) / 2.0;
  return DensityMatrix(std::move(out), 1e-8);
}

// ---------------------------------------------------------------------------
// Kraus representation

struct CollisionChannel {
  Index system_dim = 0;
  std::vector<ComplexMatrix> kraus_ops;
  double tau = 0.0;
  double theta = 0.0;
  ComplexMatrix system_hamiltonian;  // H_S the channel was built from

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    ComplexMatrix out = ComplexMatrix::Zero(system_dim, system_dim);
    for (const auto& k : kraus_ops) out.noalias() += k * rho * k.adjoint();
    return out;
  }

  /// max |sum_k K^dagger K - I|
  double completeness_error() const {
    ComplexMatrix s = ComplexMatrix::Zero(system_dim, system_dim);
    for (const auto& k : kraus_ops) s.noalias() += k.adjoint() * k;
    return max_abs(s - identity(system_dim));
  }
};

namespace detail {

// Kraus operators sqrt(p_a) <b| W |a> for the eigen-decomposition of rho_A.
inline std::vector<ComplexMatrix> kraus_from_joint(const ComplexMatrix& w, const DensityMatrix& rho_a) {
  const auto eig = eigh(rho_a.matrix());
  std::vector<ComplexMatrix> ops;
  const Index d = w.rows() / 2;
  for (Index a = 0; a < 2; ++a) {
    const double p = std::max(0.0, eig.values(a));
    for (Index b = 0; b < 2; ++b) {
      ComplexMatrix op = ComplexMatrix::Zero(d, d);
      // <beta| W |alpha> = sum_{b', a'} conj(beta_b') alpha_a' <b'|W|a'>
      for (Index bp = 0; bp < 2; ++bp)
        for (Index ap = 0; ap < 2; ++ap) {
          const Complex c = std::conj(eig.vectors(bp, b)) * eig.vectors(ap, a);
          if (c != Complex{}) op += c * ancilla_block(w, bp, ap);
        }
      ops.push_back(std::sqrt(p) * op);
    }
  }
  return ops;
}

}  // namespace detail

/// Single-collision channel Lambda_{tau,theta}: free evolution for theta,
/// then the collision of duration tau.
inline CollisionChannel kraus_set(const ComplexMatrix& system_h, double tau, double theta,
                                  const DensityMatrix& rho_a,
                                  std::optional<double> ancilla_field = std::nullopt) {
  if (rho_a.dim() != 2) throw InvalidArgument("kraus_set: auxiliary state must be a qubit");
  const ComplexMatrix u = collision_unitary(system_h, tau, ancilla_field);
  const ComplexMatrix w = u * kron(expm_unitary(system_h, theta), identity(2));
  return {system_h.rows(), detail::kraus_from_joint(w, rho_a), tau, theta, system_h};
}

/// Column-stacking superoperator sum_k conj(K) (x) K.
inline ComplexMatrix channel_superoperator(const CollisionChannel& channel) {
  const Index d = channel.system_dim;
  if (d > 32) throw DimensionError("channel_superoperator: system dimension above 32");
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : channel.kraus_ops) s += kron(k.conjugate(), k);
  return s;
}

struct ChannelSpectrum {
  std::vector<Complex> eigenvalues;  // modulus descending
  std::vector<Complex> peripheral;   // |mu| >= 1 - tol
  DensityMatrix fixed_point;
  std::vector<ComplexMatrix> fixed_space;  // Hermitian orthonormal basis
};

inline ChannelSpectrum channel_spectrum(const ComplexMatrix& superop, double tol = 1e-8) {
  require_square(superop, "channel_spectrum");
  const Index d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(superop.rows()))));
  if (d * d != superop.rows()) throw DimensionError("channel_spectrum: size is not a square number");

  Eigen::ComplexEigenSolver<ComplexMatrix> es(superop, false);
  if (es.info() != Eigen::Success) throw NumericalError("channel_spectrum: eigensolver failed");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::stable_sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return std::arg(a) < std::arg(b);
  });

  Index ones = 0;
  std::vector<Complex> peripheral;
  for (Complex mu : ev) {
    if (std::abs(mu - 1.0) < tol) ++ones;
    if (std::abs(mu) >= 1.0 - tol) peripheral.push_back(mu);
  }
  if (ones == 0) throw NumericalError("channel_spectrum: no eigenvalue within tolerance of 1");

  auto space = stationary_space(superop - identity(superop.rows()), d, tol, ones);
  return {std::move(ev), std::move(peripheral), std::move(space.canonical), std::move(space.basis)};
}

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectoryOptions {
  int record_substeps = 4;
  /// Optional replacement for the exponential waiting-time law.
  std::function<double(CounterRng&)> waiting_time;
  /// Called after every collision with the 1-based collision index.
  std::function<void(int, const DensityMatrix&)> on_collision;
};

namespace detail {

inline void check_observables(const std::vector<Observable>& obs, Index dim) {
  for (const auto& o : obs) {
    if (o.op.rows() != dim || o.op.cols() != dim)
      throw DimensionError("observable '" + o.name + "' has the wrong dimension");
    require_hermitian(o.op, kHermitianTol, ("observable " + o.name).c_str());
  }
}

inline std::vector<double> expectations(const std::vector<Observable>& obs, const ComplexMatrix& rho) {
  std::vector<double> v;
  v.reserve(obs.size());
  for (const auto& o : obs) v.push_back((o.op.cwiseProduct(rho.transpose())).sum().real());
  return v;
}

inline std::vector<double> expectations(const std::vector<Observable>& obs, const StateVector& psi) {
  std::vector<double> v;
  v.reserve(obs.size());
  for (const auto& o : obs) v.push_back(psi.dot(o.op * psi).real());
  return v;
}

}  // namespace detail

/// Stochastic collision-model run. Observables are recorded at t = 0, at
/// `record_substeps` evenly spaced points inside every free-flight interval,
/// and right after every collision. Fully determined by `seed`.
inline TrajectoryRecord run_trajectory(const SpinModel& model, const StateVector& psi0,
                                       const BathConfig& bath, int n_collisions,
                                       const std::vector<Observable>& observables,
                                       std::uint64_t seed, const TrajectoryOptions& options = {}) {
  model.validate();
  bath.validate();
  if (n_collisions < 1) throw InvalidArgument("run_trajectory: n_collisions must be >= 1");
  if (options.record_substeps < 0) throw InvalidArgument("run_trajectory: record_substeps must be >= 0");
  const Index d = model.dim();
  if (psi0.size() != d) throw DimensionError("run_trajectory: initial state has the wrong dimension");
  detail::check_observables(observables, d);

  const ComplexMatrix h = hamiltonian(model);
  const HermitianPropagator free(h);
  const std::optional<double> field_a =
      bath.include_ancilla_hamiltonian ? std::optional<double>(bath.ancilla_field) : std::nullopt;
  const ComplexMatrix u = collision_unitary(h, bath.tau, field_a);
  const auto kraus = detail::kraus_from_joint(u, thermal_ancilla(bath.beta, bath.ancilla_field));

  TrajectoryRecord rec = make_record(observables);
  rec.seed = seed;
  rec.collision_count = n_collisions;
  rec.engine = "collision";
  rec.config = {{"model", to_json(model)},
                {"bath", to_json(bath)},
                {"n_collisions", n_collisions},
                {"record_substeps", options.record_substeps}};

  CounterRng rng(seed);
  auto draw = [&] {
    return options.waiting_time ? options.waiting_time(rng) : sample_waiting_time(rng, bath.gamma);
  };

  const StateVector psi = psi0 / psi0.norm();
  ComplexMatrix rho = psi * psi.adjoint();
  const int m = options.record_substeps;
  double t = 0.0;
  rec.push(t, detail::expectations(observables, psi));

  for (int j = 1; j <= n_collisions; ++j) {
    const double theta = draw();
    if (!(theta > 0.0) || !std::isfinite(theta))
      throw NumericalError("run_trajectory: waiting time must be positive and finite");
    for (int s = 1; s <= m; ++s) {
      const double dt = theta * s / (m + 1);
      const ComplexMatrix us = free.at(dt);
      if (j == 1)
        rec.push(t + dt, detail::expectations(observables, StateVector(us * psi)));
      else
        rec.push(t + dt, detail::expectations(observables, ComplexMatrix(us * rho * us.adjoint())));
    }
    const ComplexMatrix us = free.at(theta);
    rho = us * rho * us.adjoint();
    ComplexMatrix next = ComplexMatrix::Zero(d, d);
    for (const auto& k : kraus) next.noalias() += k * rho * k.adjoint();
    rho = (next + next.adjoint()) / 2.0;
    t += theta + bath.tau;
    rec.push(t, detail::expectations(observables, rho));
    if (options.on_collision) options.on_collision(j, DensityMatrix(rho, 1e-8));
  }
  return rec;
}

}  // namespace tcrystal
