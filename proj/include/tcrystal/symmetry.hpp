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

// Dynamical symmetries A of a dissipative generator and their certification:
//   (i)  [H, A] rho_inf = -lambda A rho_inf
//   (ii) [L, A] rho_inf = 0 and [L^dag, A] L rho_inf = 0 for every jump L.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "json.hpp"
#include "tcrystal/collision.hpp"
#include "tcrystal/csv.hpp"
#include "tcrystal/error.hpp"
#include "tcrystal/kernel.hpp"
#include "tcrystal/models.hpp"
#include "tcrystal/tensor.hpp"

namespace tcrystal {

struct DynamicalSymmetry {
  ComplexMatrix op;
  std::string label;
  std::string support_note;
  /// Bohr frequency E_i - E_j of the eigenspaces A maps between, when known.
  std::optional<double> lambda;

  void validate() const {
    if (op.size() == 0 || !std::isfinite(op.norm()) || op.norm() == 0.0)
      throw InvalidArgument("DynamicalSymmetry: operator must be nonzero and finite");
  }
};

/// A jump operator with the name used in reports ("minus", "plus", ...).
struct NamedOperator {
  std::string name;
  ComplexMatrix op;
};

/// Cooling jump on qubit 1 only (zero temperature).
inline std::vector<NamedOperator> zero_temperature_jumps(int n_qubits) {
  return {{"minus", embed(decay_jump(), 1, n_qubits)}};
}

/// Cooling and heating jumps on qubit 1.
inline std::vector<NamedOperator> thermal_jumps(int n_qubits) {
  return {{"minus", embed(decay_jump(), 1, n_qubits)}, {"plus", embed(excitation_jump(), 1, n_qubits)}};
}

// ---------------------------------------------------------------------------
// Explicit operators

namespace detail {

inline StateVector superpose(std::initializer_list<std::pair<const char*, double>> terms) {
  StateVector v;
  for (const auto& [bits, c] : terms) {
    const StateVector b = basis_state(bits);
    if (v.size() == 0) v = StateVector::Zero(b.size());
    v += c * b;
  }
  return v / v.norm();
}

}  // namespace detail

/// |psi><phi| with |psi> = |000>, |phi> = (|010> - |001>)/sqrt(2).
inline DynamicalSymmetry lmg_symmetry_n3() {
  const StateVector psi = basis_state("000");
  const StateVector phi = detail::superpose({{"010", 1.0}, {"001", -1.0}});
  return {outer(psi, phi), "lmg_n3", "bra and ket differ on q2 and q3", std::nullopt};
}

/// I (x) |t1><f1| with |t1> = (|001> - |100>)/sqrt(2) and
/// |f1> = (|011> - |110>)/sqrt(2) on q2 q3 q4.
inline DynamicalSymmetry xxz_symmetry_a1() {
  const StateVector t1 = detail::superpose({{"001", 1.0}, {"100", -1.0}});
  const StateVector f1 = detail::superpose({{"011", 1.0}, {"110", -1.0}});
  return {kron(identity(2), outer(t1, f1)), "xxz_a1",
          "q1 carries the identity; q3 is the only site that differs between bra and ket", std::nullopt};
}

/// |t2><f2| with |t2> = (|0100> - |0001>)/sqrt(2) and |f2> = |0000>.
inline DynamicalSymmetry xxz_symmetry_a2() {
  const StateVector t2 = detail::superpose({{"0100", 1.0}, {"0001", -1.0}});
  const StateVector f2 = basis_state("0000");
  return {outer(t2, f2), "xxz_a2", "q1 fixed to |0>; bra and ket differ on q2 and q4", std::nullopt};
}

/// Qubits flipped by at least one nonzero matrix element of `a`.
inline std::string flipped_qubits_note(const ComplexMatrix& a, double tol = 1e-12) {
  const int n = qubit_count_for(a.rows());
  if (n < 1) return "";
  Index mask = 0;
  const double scale = max_abs(a);
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c)
      if (std::abs(a(r, c)) > tol * scale) mask |= (r ^ c);
  std::string note = "flips";
  bool any = false;
  for (int q = 1; q <= n; ++q)
    if (mask & detail::flip_mask(q, n)) {
      note += " q" + std::to_string(q);
      any = true;
    }
  return any ? note : "diagonal in the computational basis";
}

// ---------------------------------------------------------------------------
// Conditions

struct ConditionI {
  double lambda_est = 0.0;
  double residual = 0.0;
};

struct ConditionII {
  double first = 0.0;   // ||[L, A] rho|| / (||A|| ||rho||)
  double second = 0.0;  // ||[L^dag, A] L rho|| / (||A|| ||rho||)
  double worst() const { return std::max(first, second); }
};

namespace detail {

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError(std::string(what) + ": dimension mismatch");
}

// Below this, A rho_inf is treated as the zero operator.
inline constexpr double kVacuousWeight = 1e-10;

}  // namespace detail

/// Least-squares lambda for [H, A] rho = -lambda A rho and the relative
/// residual of that fit.
inline ConditionI check_condition_i(const ComplexMatrix& h, const ComplexMatrix& a, const ComplexMatrix& rho) {
  detail::require_same_dim(h, a, "check_condition_i");
  detail::require_same_dim(h, rho, "check_condition_i");
  const ComplexMatrix ar = a * rho;
  const double nar = ar.norm();
  if (nar <= detail::kVacuousWeight * std::max(1.0, a.norm() * rho.norm()))
    throw NumericalError("check_condition_i: A rho_inf is numerically zero; A has no weight on the steady state");
  const ComplexMatrix cr = commutator(h, a) * rho;
  const double lambda = -frobenius_inner(ar, cr).real() / (nar * nar);
  return {lambda, (cr + lambda * ar).norm() / nar};
}

inline ConditionII check_condition_ii(const ComplexMatrix& l, const ComplexMatrix& a, const ComplexMatrix& rho) {
  detail::require_same_dim(l, a, "check_condition_ii");
  detail::require_same_dim(l, rho, "check_condition_ii");
  const double scale = a.norm() * rho.norm();
  if (scale == 0.0) throw InvalidArgument("check_condition_ii: A and rho_inf must be nonzero");
  const ComplexMatrix ld = l.adjoint();
  return {(commutator(l, a) * rho).norm() / scale, (commutator(ld, a) * l * rho).norm() / scale};
}

// ---------------------------------------------------------------------------
// Certification

struct JumpResidual {
  std::string name;
  ConditionII residual;
  /// True when exactly one of the two clauses passes at the tolerance.
  bool clauses_disagree = false;
};

struct SymmetryReport {
  std::string label;
  double lambda_est = 0.0;
  double residual_i = 0.0;
  std::vector<JumpResidual> jumps;
  std::optional<Complex> overlap_with_initial;
  double tol = 1e-7;
  /// Number of steady-state elements checked (1 unless certified over a space).
  int states_checked = 1;

  bool pass_i() const { return residual_i < tol; }
  bool pass_ii(const std::string& name) const {
    const auto r = residual_ii(name);
    return r && *r < tol;
  }
  bool pass_ii() const {
    return std::all_of(jumps.begin(), jumps.end(), [&](const auto& j) { return j.residual.worst() < tol; });
  }
  bool supported() const { return pass_i() && pass_ii(); }

  std::optional<double> residual_ii(const std::string& name) const {
    for (const auto& j : jumps)
      if (j.name == name) return j.residual.worst();
    return std::nullopt;
  }
  std::optional<double> residual_ii_minus() const { return residual_ii("minus"); }
  std::optional<double> residual_ii_plus() const { return residual_ii("plus"); }
};

inline nlohmann::json to_json(const SymmetryReport& r) {
  nlohmann::json ii = nlohmann::json::object();
  nlohmann::json verdict_ii = nlohmann::json::object();
  for (const auto& j : r.jumps) {
    ii[j.name] = {{"first", j.residual.first}, {"second", j.residual.second}, {"clauses_disagree", j.clauses_disagree}};
    verdict_ii[j.name] = j.residual.worst() < r.tol;
  }
  nlohmann::json out{{"label", r.label},
                     {"lambda_est", r.lambda_est},
                     {"abs_lambda", std::abs(r.lambda_est)},
                     {"residuals", {{"i", r.residual_i}, {"ii", ii}}},
                     {"verdict", {{"i", r.pass_i()}, {"ii", verdict_ii}, {"supported", r.supported()}}},
                     {"tol", r.tol},
                     {"states_checked", r.states_checked}};
  if (r.overlap_with_initial)
    out["overlap_with_initial"] = {{"re", r.overlap_with_initial->real()}, {"im", r.overlap_with_initial->imag()}};
  return out;
}

namespace detail {

inline void merge_jump(JumpResidual& into, const ConditionII& r) {
  into.residual.first = std::max(into.residual.first, r.first);
  into.residual.second = std::max(into.residual.second, r.second);
}

inline void finish(SymmetryReport& rep, const ComplexMatrix& a, const std::optional<DensityMatrix>& initial) {
  for (auto& j : rep.jumps) j.clauses_disagree = (j.residual.first < rep.tol) != (j.residual.second < rep.tol);
  if (initial) rep.overlap_with_initial = frobenius_inner(a, initial->matrix()) / a.norm();
}

}  // namespace detail

/// Conditions (i) and (ii) against one steady state.
inline SymmetryReport certify(const ComplexMatrix& h, const std::vector<NamedOperator>& jumps,
                              const DynamicalSymmetry& a, const ComplexMatrix& rho_inf, double tol = 1e-7,
                              const std::optional<DensityMatrix>& initial = std::nullopt) {
  a.validate();
  const auto ci = check_condition_i(h, a.op, rho_inf);
  SymmetryReport rep;
  rep.label = a.label;
  rep.lambda_est = ci.lambda_est;
  rep.residual_i = ci.residual;
  rep.tol = tol;
  for (const auto& j : jumps) rep.jumps.push_back({j.name, check_condition_ii(j.op, a.op, rho_inf), false});
  detail::finish(rep, a.op, initial);
  return rep;
}

/// Worst case over a stationary space: condition (i) on every basis element
/// (and the canonical state) with nonzero A rho weight, condition (ii) on all.
inline SymmetryReport certify(const ComplexMatrix& h, const std::vector<NamedOperator>& jumps,
                              const DynamicalSymmetry& a, const StationarySpace& space, double tol = 1e-7,
                              const std::optional<DensityMatrix>& initial = std::nullopt) {
  a.validate();
  std::vector<ComplexMatrix> states{space.canonical.matrix()};
  states.insert(states.end(), space.basis.begin(), space.basis.end());

  SymmetryReport rep;
  rep.label = a.label;
  rep.tol = tol;
  rep.states_checked = static_cast<int>(states.size());
  for (const auto& j : jumps) rep.jumps.push_back({j.name, {}, false});

  bool have_lambda = false;
  for (const auto& s : states) {
    const double weight = (a.op * s).norm();
    if (weight > detail::kVacuousWeight * std::max(1.0, a.op.norm() * s.norm())) {
      const auto ci = check_condition_i(h, a.op, s);
      if (!have_lambda) rep.lambda_est = ci.lambda_est;
      have_lambda = true;
      rep.residual_i = std::max(rep.residual_i, ci.residual);
    }
    for (std::size_t k = 0; k < jumps.size(); ++k)
      detail::merge_jump(rep.jumps[k], check_condition_ii(jumps[k].op, a.op, s));
  }
  if (!have_lambda)
    throw NumericalError("certify: A rho is numerically zero on the whole stationary space");
  detail::finish(rep, a.op, initial);
  return rep;
}

/// max_k ||[O_k, A] rho_inf|| / (||A|| ||rho_inf||) with the dissipative
/// Kraus operators O_k = K_k exp(+i H_S (tau + theta)), i.e. the channel with
/// its free evolution removed.
inline double kraus_condition_check(const CollisionChannel& channel, const ComplexMatrix& a,
                                    const ComplexMatrix& rho_inf) {
  detail::require_same_dim(a, rho_inf, "kraus_condition_check");
  if (a.rows() != channel.system_dim) throw DimensionError("kraus_condition_check: dimension mismatch");
  if (channel.system_hamiltonian.rows() != channel.system_dim)
    throw InvalidArgument("kraus_condition_check: channel carries no system Hamiltonian");
  const double scale = a.norm() * rho_inf.norm();
  if (scale == 0.0) throw InvalidArgument("kraus_condition_check: A and rho_inf must be nonzero");
  const ComplexMatrix back = expm_unitary(channel.system_hamiltonian, -(channel.tau + channel.theta));
  double worst = 0.0;
  for (const auto& k : channel.kraus_ops) {
    const ComplexMatrix o = k * back;
    worst = std::max(worst, (commutator(o, a) * rho_inf).norm() / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Search

/// Eigen-operators of ad_H grouped by Bohr frequency lambda = E_i - E_j,
/// restricted to the subspace solving condition (ii) for every jump, with
/// solutions that vanish on rho_inf removed. Candidates are unit-norm and
/// sorted by lambda.
inline std::vector<DynamicalSymmetry> search_symmetries(const ComplexMatrix& h,
                                                        const std::vector<NamedOperator>& jumps,
                                                        const ComplexMatrix& rho_inf, double tol = 1e-7) {
  require_hermitian(h, kHermitianTol, "search_symmetries");
  detail::require_same_dim(h, rho_inf, "search_symmetries");
  const Index d = h.rows();
  if (d > 64) throw DimensionError("search_symmetries: dimension above 64");
  for (const auto& j : jumps) detail::require_same_dim(h, j.op, "search_symmetries");

  const auto eig = eigh(h);
  struct Pair {
    double lambda;
    Index i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(d * d));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) pairs.push_back({eig.values(i) - eig.values(j), i, j});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.lambda < b.lambda; });

  const double group_tol = 1e-8 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  const double rho_scale = std::max(rho_inf.norm(), 1e-300);
  std::vector<DynamicalSymmetry> out;

  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t stop = start + 1;
    while (stop < pairs.size() && pairs[stop].lambda - pairs[stop - 1].lambda <= group_tol) ++stop;
    const Index m = static_cast<Index>(stop - start);
    double lambda = 0.0;
    std::vector<ComplexMatrix> basis;
    basis.reserve(static_cast<std::size_t>(m));
    for (std::size_t p = start; p < stop; ++p) {
      lambda += pairs[p].lambda;
      basis.push_back(outer(eig.vectors.col(pairs[p].i), eig.vectors.col(pairs[p].j)));
    }
    lambda /= static_cast<double>(m);
    start = stop;

    // Stack vec([L, B] rho) and vec([L^dag, B] L rho) for every basis element B.
    const Index rows = 2 * static_cast<Index>(jumps.size()) * d * d;
    ComplexMatrix null_basis = ComplexMatrix::Identity(m, m);
    if (rows > 0) {
      ComplexMatrix c(rows, m);
      for (Index col = 0; col < m; ++col) {
        const ComplexMatrix& b = basis[static_cast<std::size_t>(col)];
        Index off = 0;
        for (const auto& j : jumps) {
          c.col(col).segment(off, d * d) = vec(commutator(j.op, b) * rho_inf) / rho_scale;
          off += d * d;
          c.col(col).segment(off, d * d) = vec(commutator(j.op.adjoint(), b) * j.op * rho_inf) / rho_scale;
          off += d * d;
        }
      }
      Eigen::BDCSVD<ComplexMatrix> svd(c, Eigen::ComputeFullV);
      const RealVector& s = svd.singularValues();
      Index k = 0;
      // Columns beyond the number of rows are null directions too.
      const Index rank_slots = s.size();
      while (k < rank_slots && s(rank_slots - 1 - k) <= tol) ++k;
      const Index nullity = k + (m - rank_slots);
      if (nullity == 0) continue;
      null_basis = svd.matrixV().rightCols(nullity);
    }

    // Drop directions with A rho = 0 (condition (ii) holds vacuously there).
    ComplexMatrix weight(d * d, null_basis.cols());
    std::vector<ComplexMatrix> cand(static_cast<std::size_t>(null_basis.cols()));
    for (Index c = 0; c < null_basis.cols(); ++c) {
      ComplexMatrix a = ComplexMatrix::Zero(d, d);
      for (Index p = 0; p < m; ++p)
        if (null_basis(p, c) != Complex{}) a += null_basis(p, c) * basis[static_cast<std::size_t>(p)];
      weight.col(c) = vec(a * rho_inf) / rho_scale;
      cand[static_cast<std::size_t>(c)] = std::move(a);
    }
    Eigen::BDCSVD<ComplexMatrix> wsvd(weight, Eigen::ComputeFullV);
    const RealVector& ws = wsvd.singularValues();
    for (Index r = 0; r < ws.size(); ++r) {
      if (ws(r) <= tol) break;
      ComplexMatrix a = ComplexMatrix::Zero(d, d);
      for (Index c = 0; c < null_basis.cols(); ++c) a += wsvd.matrixV()(c, r) * cand[static_cast<std::size_t>(c)];
      a /= a.norm();
      out.push_back({a, "search lambda=" + format_double(lambda), flipped_qubits_note(a), lambda});
    }
  }
  return out;
}

/// |<A, B>| / (||A|| ||B||)
inline double operator_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double s = a.norm() * b.norm();
  if (s == 0.0) throw InvalidArgument("operator_overlap: zero operator");
  return std::abs(frobenius_inner(a, b)) / s;
}

}  // namespace tcrystal
