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

// Independent reference implementations used only by the tests. They share
// no code paths with the library beyond Eigen's dense types: products are
// explicit loops, Hamiltonians are sums of Pauli strings, exponentials are
// Taylor series with scaling and squaring.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline M sx() {
  M m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline M sy() {
  M m(2, 2);
  m << 0, C(0, -1), C(0, 1), 0;
  return m;
}
inline M sz() {
  M m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline M id2() { return M::Identity(2, 2); }

inline M kron(const M& a, const M& b) {
  M out = M::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Tensor product of single-qubit operators, qubit 1 leftmost.
inline M string(const std::vector<M>& ops) {
  M out = M::Identity(1, 1);
  for (const auto& o : ops) out = kron(out, o);
  return out;
}

/// op on `site` (1-based) of n qubits.
inline M on(const M& op, int site, int n) {
  std::vector<M> ops(static_cast<std::size_t>(n), id2());
  ops[static_cast<std::size_t>(site - 1)] = op;
  return string(ops);
}

inline M lmg(int n, double j, double b) {
  const Eigen::Index d = Eigen::Index{1} << n;
  M h = M::Zero(d, d);
  for (int p = 1; p <= n; ++p)
    for (int q = p + 1; q <= n; ++q) h -= (j / n) * (on(sx(), p, n) * on(sx(), q, n) + on(sy(), p, n) * on(sy(), q, n));
  for (int p = 1; p <= n; ++p) h -= b * on(sz(), p, n);
  return h;
}

inline M xxz(int n, double j, double b, bool periodic, double delta = 0.0) {
  const Eigen::Index d = Eigen::Index{1} << n;
  M h = M::Zero(d, d);
  std::vector<std::pair<int, int>> bonds;
  for (int p = 1; p < n; ++p) bonds.emplace_back(p, p + 1);
  if (periodic && n > 2) bonds.emplace_back(n, 1);
  for (auto [p, q] : bonds) {
    h += j * (on(sx(), p, n) * on(sx(), q, n) + on(sy(), p, n) * on(sy(), q, n));
    h += delta * on(sz(), p, n) * on(sz(), q, n);
  }
  for (int p = 1; p <= n; ++p) h += b * on(sz(), p, n);
  return h;
}

/// exp(a) by Taylor series after scaling by 2^s with ||a / 2^s|| < 0.05.
inline M expm(const M& a) {
  const double nrm = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  while (nrm / std::ldexp(1.0, s) > 0.05) ++s;
  const M x = a / std::ldexp(1.0, s);
  M term = M::Identity(a.rows(), a.cols());
  M sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// Tr_{others} by explicit index summation; `keep` is a sorted 1-based list.
inline M partial_trace(const M& rho, int n, const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  const Eigen::Index dk = Eigen::Index{1} << k;
  M out = M::Zero(dk, dk);
  const Eigen::Index d = Eigen::Index{1} << n;
  auto bit = [&](Eigen::Index s, int q) { return (s >> (n - q)) & 1; };
  auto reduced = [&](Eigen::Index s) {
    Eigen::Index r = 0;
    for (int q : keep) r = (r << 1) | bit(s, q);
    return r;
  };
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      bool same = true;
      for (int q = 1; q <= n && same; ++q) {
        bool kept = false;
        for (int kq : keep) kept |= (kq == q);
        if (!kept && bit(r, q) != bit(c, q)) same = false;
      }
      if (same) out(reduced(r), reduced(c)) += rho(r, c);
    }
  return out;
}

/// GKSL right-hand side evaluated term by term.
inline M gksl(const M& h, const std::vector<std::pair<M, double>>& jumps, const M& rho) {
  const C i(0, 1);
  M out = -i * (h * rho - rho * h);
  for (const auto& [l, r] : jumps) {
    const M ld = l.adjoint();
    out += r * (l * rho * ld - 0.5 * (ld * l * rho + rho * ld * l));
  }
  return out;
}

/// Matrix of the GKSL map built column by column from gksl() on basis
/// matrices (column-stacking convention).
inline M liouvillian(const M& h, const std::vector<std::pair<M, double>>& jumps) {
  const Eigen::Index d = h.rows();
  M l(d * d, d * d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) {
      M e = M::Zero(d, d);
      e(r, c) = 1.0;
      const M out = gksl(h, jumps, e);
      for (Eigen::Index cc = 0; cc < d; ++cc)
        for (Eigen::Index rr = 0; rr < d; ++rr) l(cc * d + rr, c * d + r) = out(rr, cc);
    }
  return l;
}

/// Haar-ish random density matrix of rank `rank` from Gaussian Ginibre factors.
inline M random_state(Eigen::Index d, std::mt19937_64& gen, Eigen::Index rank = -1) {
  if (rank < 0) rank = d;
  std::normal_distribution<double> g;
  M a(d, rank);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) a(i, j) = C(g(gen), g(gen));
  M rho = a * a.adjoint();
  return rho / rho.trace();
}

inline M random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  M a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = C(g(gen), g(gen));
  return a;
}

inline M random_hermitian(Eigen::Index d, std::mt19937_64& gen) {
  const M a = random_matrix(d, d, gen);
  return (a + a.adjoint()) / 2.0;
}

/// Direct Stinespring evaluation of one collision step:
/// Tr_A[W (rho (x) rho_A) W^dag] with W = exp(-i tau (H (x) I + H_int)) (U_S(theta) (x) I).
inline M collision_step(const M& h, const M& rho, const M& rho_a, double tau, double theta) {
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(h.rows()))));
  const C i(0, 1);
  M hj = kron(h, id2());
  hj += 0.5 * (on(sx(), 1, n + 1) * on(sx(), n + 1, n + 1) + on(sy(), 1, n + 1) * on(sy(), n + 1, n + 1));
  const M w = expm(-i * tau * hj) * kron(expm(-i * theta * h), id2());
  const M joint = w * kron(rho, rho_a) * w.adjoint();
  std::vector<int> keep;
  for (int q = 1; q <= n; ++q) keep.push_back(q);
  return partial_trace(joint, n + 1, keep);
}

}  // namespace oracle
