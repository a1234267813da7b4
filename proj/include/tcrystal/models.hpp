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

// Spin Hamiltonians, auxiliary-qubit states, initial states and the
// closed-form spectral prediction for the isotropic all-to-all model.
//
// Units: hbar = 1; frequencies are angular and equal energy differences.

#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcrystal/csv.hpp"
#include "tcrystal/tensor.hpp"

namespace tcrystal {

enum class PauliAxis { x, y, z, plus, minus };

/// Pauli matrices and ladders sigma_+- = (sigma_x +- i sigma_y) / 2.
///
/// sigma_+ = |0><1| and sigma_- = |1><0|. Because |0> is the ground state of a
/// -B sigma_z field, sigma_- raises the local energy; see decay_jump().
inline ComplexMatrix pauli(PauliAxis axis) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (axis) {
    case PauliAxis::x:
      m(0, 1) = m(1, 0) = 1.0;
      break;
    case PauliAxis::y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case PauliAxis::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case PauliAxis::plus:
      m(0, 1) = 1.0;
      break;
    case PauliAxis::minus:
      m(1, 0) = 1.0;
      break;
  }
  return m;
}

/// Energy-lowering jump |0><1| for a qubit in a -B sigma_z field: the
/// "sigma_-" of the thermal master equation (rate Gamma (n + 1)).
inline ComplexMatrix decay_jump() { return pauli(PauliAxis::plus); }

/// Energy-raising jump |1><0| (rate Gamma n).
inline ComplexMatrix excitation_jump() { return pauli(PauliAxis::minus); }

/// I (x) ... (x) op (x) ... (x) I with op at `site` (1-based).
inline ComplexMatrix embed(const ComplexMatrix& op, int site, int n_qubits) {
  if (op.rows() != 2 || op.cols() != 2) throw DimensionError("embed: expected a 2x2 operator");
  if (n_qubits < 1 || site < 1 || site > n_qubits)
    throw InvalidArgument("embed: site " + std::to_string(site) + " outside 1.." +
                          std::to_string(n_qubits));
  const Index left = Index{1} << (site - 1);
  const Index right = Index{1} << (n_qubits - site);
  return kron(kron(identity(left), op), identity(right));
}

inline ComplexMatrix collective_sx(int n_qubits) {
  if (n_qubits < 1) throw InvalidArgument("collective_sx: need at least one qubit");
  ComplexMatrix s = ComplexMatrix::Zero(Index{1} << n_qubits, Index{1} << n_qubits);
  for (int q = 1; q <= n_qubits; ++q) s += embed(pauli(PauliAxis::x), q, n_qubits);
  return s;
}

// ---------------------------------------------------------------------------
// Spin models

enum class ModelKind { lmg, xxz };

inline std::string_view to_string(ModelKind k) { return k == ModelKind::lmg ? "lmg" : "xxz"; }

struct SpinModel {
  ModelKind kind = ModelKind::lmg;
  int n_qubits = 3;
  double coupling = 1.0;  // J
  double field = 0.5;     // B
  bool periodic = false;  // XXZ only: adds the (N, 1) bond
  double delta = 0.0;     // XXZ only: sigma_z sigma_z coefficient, omitted by default

  void validate() const {
    if (n_qubits < 2) throw InvalidArgument("SpinModel: n_qubits must be >= 2");
    if (n_qubits > 12) throw InvalidArgument("SpinModel: dense storage is limited to 12 qubits");
    if (!std::isfinite(coupling) || !std::isfinite(field) || !std::isfinite(delta))
      throw InvalidArgument("SpinModel: J, B and delta must be finite");
  }

  Index dim() const { return Index{1} << n_qubits; }
};

namespace detail {

// Bit of qubit q (1-based, qubit 1 most significant) in basis index s.
inline bool bit(Index s, int q, int n) { return (s >> (n - q)) & 1; }
inline Index flip_mask(int q, int n) { return Index{1} << (n - q); }
inline double z_eigenvalue(Index s, int q, int n) { return bit(s, q, n) ? -1.0 : 1.0; }

// Adds c (sigma_x^i sigma_x^j + sigma_y^i sigma_y^j) = 2c (|01><10| + |10><01|).
inline void add_flip_flop(ComplexMatrix& h, int i, int j, int n, double c) {
  const Index mask = flip_mask(i, n) | flip_mask(j, n);
  for (Index s = 0; s < h.rows(); ++s)
    if (bit(s, i, n) != bit(s, j, n)) h(s ^ mask, s) += 2.0 * c;
}

}  // namespace detail

/// H = -(J/N) sum_{i<j} (sx_i sx_j + sy_i sy_j) - B sum_i sz_i
inline ComplexMatrix lmg_hamiltonian(const SpinModel& model) {
  model.validate();
  if (model.kind != ModelKind::lmg) throw InvalidArgument("lmg_hamiltonian: model is not LMG");
  const int n = model.n_qubits;
  ComplexMatrix h = ComplexMatrix::Zero(model.dim(), model.dim());
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) detail::add_flip_flop(h, i, j, n, -model.coupling / n);
  for (Index s = 0; s < h.rows(); ++s)
    for (int q = 1; q <= n; ++q) h(s, s) -= model.field * detail::z_eigenvalue(s, q, n);
  return h;
}

/// H = J sum_bonds (sx sx + sy sy) + delta sum_bonds sz sz + B sum_i sz_i,
/// bonds (i, i+1) for i < N plus (N, 1) when periodic.
inline ComplexMatrix xxz_hamiltonian(const SpinModel& model) {
  model.validate();
  if (model.kind != ModelKind::xxz) throw InvalidArgument("xxz_hamiltonian: model is not XXZ");
  const int n = model.n_qubits;
  std::vector<std::pair<int, int>> bonds;
  for (int i = 1; i < n; ++i) bonds.emplace_back(i, i + 1);
  if (model.periodic && n > 2) bonds.emplace_back(n, 1);

  ComplexMatrix h = ComplexMatrix::Zero(model.dim(), model.dim());
  for (auto [i, j] : bonds) detail::add_flip_flop(h, i, j, n, model.coupling);
  for (Index s = 0; s < h.rows(); ++s) {
    for (int q = 1; q <= n; ++q) h(s, s) += model.field * detail::z_eigenvalue(s, q, n);
    for (auto [i, j] : bonds)
      h(s, s) += model.delta * detail::z_eigenvalue(s, i, n) * detail::z_eigenvalue(s, j, n);
  }
  return h;
}

inline ComplexMatrix hamiltonian(const SpinModel& model) {
  return model.kind == ModelKind::lmg ? lmg_hamiltonian(model) : xxz_hamiltonian(model);
}

// ---------------------------------------------------------------------------
// States

/// Thermal auxiliary qubit with ground-state population (1 + tanh(beta B_A / 2)) / 2.
/// beta = +infinity gives |0><0|.
inline DensityMatrix thermal_ancilla(double beta, double ancilla_field) {
  if (std::isnan(beta) || beta < 0.0) throw InvalidArgument("thermal_ancilla: beta must be >= 0");
  if (!std::isfinite(ancilla_field)) throw InvalidArgument("thermal_ancilla: field must be finite");
  const double t = std::isinf(beta) ? (ancilla_field > 0 ? 1.0 : ancilla_field < 0 ? -1.0 : 0.0)
                                    : std::tanh(beta * ancilla_field / 2.0);
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = (1.0 + t) / 2.0;
  m(1, 1) = (1.0 - t) / 2.0;
  return DensityMatrix(std::move(m));
}

/// Product state from per-qubit labels '0', '1', '+', '-', e.g. "0+0".
inline StateVector initial_state(std::string_view labels) {
  if (labels.empty()) throw InvalidArgument("initial_state: empty label list");
  const double r = 1.0 / std::sqrt(2.0);
  StateVector psi = StateVector::Ones(1);
  for (char c : labels) {
    StateVector q(2);
    switch (c) {
      case '0': q << 1.0, 0.0; break;
      case '1': q << 0.0, 1.0; break;
      case '+': q << r, r; break;
      case '-': q << r, -r; break;
      default:
        throw InvalidArgument(std::string("initial_state: invalid label '") + c + "'");
    }
    StateVector next(psi.size() * 2);
    for (Index i = 0; i < psi.size(); ++i) next.segment(2 * i, 2) = psi(i) * q;
    psi = std::move(next);
  }
  return psi / psi.norm();
}

/// |b_1 ... b_n> from a bit string such as "0101".
inline StateVector basis_state(std::string_view bits) {
  for (char c : bits)
    if (c != '0' && c != '1') throw InvalidArgument("basis_state: bits must be 0 or 1");
  return initial_state(bits);
}

// ---------------------------------------------------------------------------
// Spectral prediction

struct SpectralPrediction {
  double e_nu = 0.0;
  double e_mu = 0.0;
  int degeneracy_mu = 0;
  double lambda = 0.0;
};

/// Dark-subspace energies of the LMG model at J = 1:
/// E_nu = -N B (state |0...0>), E_mu = 2/N - (N - 2) B with (N - 1)-fold
/// degeneracy, and oscillation frequency lambda = E_mu - E_nu = 2/N + 2B.
inline SpectralPrediction lmg_prediction(int n_qubits, double field) {
  if (n_qubits < 3)
    throw InvalidArgument("lmg_prediction: N >= 3 required (N = 2 has no stable oscillation)");
  SpectralPrediction p;
  p.e_nu = -n_qubits * field;
  p.e_mu = 2.0 / n_qubits - (n_qubits - 2) * field;
  p.degeneracy_mu = n_qubits - 1;
  p.lambda = p.e_mu - p.e_nu;
  return p;
}

struct SpectrumRow {
  double field = 0.0;
  std::vector<double> energies;  // ascending
};

inline std::vector<SpectrumRow> spectrum_sweep(const SpinModel& model,
                                               std::span<const double> fields) {
  std::vector<SpectrumRow> rows;
  rows.reserve(fields.size());
  for (double b : fields) {
    SpinModel m = model;
    m.field = b;
    const RealVector e = eigh(hamiltonian(m)).values;
    rows.push_back({b, std::vector<double>(e.data(), e.data() + e.size())});
  }
  return rows;
}

/// CSV with header `B,e_0,e_1,...`.
inline void write_spectrum_csv(std::ostream& os, std::span<const SpectrumRow> rows) {
  const std::size_t levels = rows.empty() ? 0 : rows.front().energies.size();
  os << "B";
  for (std::size_t k = 0; k < levels; ++k) os << ",e_" << k;
  os << '\n';
  for (const auto& row : rows) {
    os << format_double(row.field);
    for (double e : row.energies) os << ',' << format_double(e);
    os << '\n';
  }
}

}  // namespace tcrystal
