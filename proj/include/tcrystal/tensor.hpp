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

// Dense complex linear algebra on multi-qubit Hilbert spaces.
//
// Conventions used throughout the library:
//   * qubit 1 is the leftmost (most significant) tensor factor, so the basis
//     index of |b_1 b_2 ... b_n> is sum_q b_q 2^(n-q);
//   * |0> = (1, 0) is the +1 eigenvector of sigma_z;
//   * vectorization is column stacking, vec(A X B) = (B^T kron A) vec(X).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tcrystal/error.hpp"

namespace tcrystal {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kHermitianTol = 1e-10;

inline ComplexMatrix identity(Index dim) { return ComplexMatrix::Identity(dim, dim); }

/// Largest entrywise modulus.
inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
  return hermiticity_error(m) <= tol;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_hermitian(const ComplexMatrix& m, double tol, const char* what) {
  require_square(m, what);
  const double err = hermiticity_error(m);
  if (err > tol)
    throw InvalidArgument(std::string(what) + ": matrix is not Hermitian (max |h - h^dagger| = " +
                          std::to_string(err) + ")");
}

/// Number of qubits n with 2^n == dim, or -1 if dim is not a power of two.
inline int qubit_count_for(Index dim) {
  if (dim <= 0 || (dim & (dim - 1)) != 0) return -1;
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  return n;
}

/// A trace-one Hermitian positive operator.
///
/// Construction checks Hermiticity and trace; positivity needs a
/// diagonalization and is checked on demand through min_eigenvalue().
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, double tol = kHermitianTol) : m_(std::move(m)) {
    require_hermitian(m_, tol, "DensityMatrix");
    const double tr_err = std::abs(m_.trace() - Complex{1.0, 0.0});
    if (tr_err > tol)
      throw InvalidArgument("DensityMatrix: trace differs from 1 by " + std::to_string(tr_err));
  }

  static DensityMatrix pure(const StateVector& psi) {
    const double norm = psi.norm();
    if (norm == 0.0) throw InvalidArgument("DensityMatrix::pure: zero vector");
    const StateVector u = psi / norm;
    return DensityMatrix(u * u.adjoint());
  }

  static DensityMatrix maximally_mixed(Index dim) {
    return DensityMatrix(identity(dim) / static_cast<double>(dim));
  }

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  double purity() const { return (m_ * m_).trace().real(); }

  /// Real part of Tr(O rho); exact for Hermitian O.
  double expectation(const ComplexMatrix& op) const {
    if (op.rows() != dim() || op.cols() != dim())
      throw DimensionError("DensityMatrix::expectation: operator dimension mismatch");
    // Tr(O rho) = sum_ij O_ij rho_ji
    return (op.cwiseProduct(m_.transpose())).sum().real();
  }

 private:
  ComplexMatrix m_;
};

// ---------------------------------------------------------------------------
// Products

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DimensionError("commutator: operands must be square with equal dimension");
  return a * b - b * a;
}

/// Hilbert-Schmidt inner product Tr(a^dagger b).
inline Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("frobenius_inner: dimension mismatch");
  return (a.conjugate().cwiseProduct(b)).sum();
}

/// |a><b|
inline ComplexMatrix outer(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw DimensionError("outer: vectors have different dimension");
  return a * b.adjoint();
}

inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Index dim) {
  if (v.size() != dim * dim) throw DimensionError("unvec: length is not dim^2");
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

// ---------------------------------------------------------------------------
// Partial trace

/// Reduced operator on the qubits in `keep` (1-based, any order; the result
/// keeps them in ascending order, i.e. their original relative order).
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, int qubit_count,
                                   std::span<const int> keep) {
  require_square(rho, "partial_trace");
  if (qubit_count < 1 || rho.rows() != (Index{1} << qubit_count))
    throw DimensionError("partial_trace: operator dimension is not 2^qubit_count");
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");

  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  for (int q : kept)
    if (q < 1 || q > qubit_count)
      throw InvalidArgument("partial_trace: qubit index " + std::to_string(q) + " out of range");
  std::vector<int> traced;
  for (int q = 1; q <= qubit_count; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  // Scatter a compact bit pattern over the listed qubit positions.
  auto scatter = [qubit_count](Index pattern, const std::vector<int>& qubits) {
    Index full = 0;
    const int m = static_cast<int>(qubits.size());
    for (int k = 0; k < m; ++k)
      if ((pattern >> (m - 1 - k)) & 1) full |= Index{1} << (qubit_count - qubits[k]);
    return full;
  };

  const Index dk = Index{1} << kept.size();
  const Index dt = Index{1} << traced.size();
  std::vector<Index> kept_idx(dk), traced_idx(dt);
  for (Index p = 0; p < dk; ++p) kept_idx[p] = scatter(p, kept);
  for (Index p = 0; p < dt; ++p) traced_idx[p] = scatter(p, traced);

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Index i = 0; i < dk; ++i)
    for (Index j = 0; j < dk; ++j) {
      Complex acc{0.0, 0.0};
      for (Index t = 0; t < dt; ++t) acc += rho(kept_idx[i] | traced_idx[t], kept_idx[j] | traced_idx[t]);
      out(i, j) = acc;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, int qubit_count,
                                   std::span<const int> keep) {
  return DensityMatrix(partial_trace(rho.matrix(), qubit_count, keep));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, int qubit_count,
                                   std::initializer_list<int> keep) {
  return partial_trace(rho, qubit_count, std::span<const int>(keep.begin(), keep.size()));
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors; // columns
};

namespace detail {

inline Index find_root(std::vector<Index>& parent, Index i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

/// Connected components of the exact nonzero pattern of a square matrix.
inline std::vector<std::vector<Index>> coupling_blocks(const ComplexMatrix& m) {
  const Index d = m.rows();
  std::vector<Index> parent(d);
  std::iota(parent.begin(), parent.end(), Index{0});
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < j; ++i)
      if (m(i, j) != Complex{} || m(j, i) != Complex{}) {
        const Index a = find_root(parent, i), b = find_root(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(d, -1);
  for (Index i = 0; i < d; ++i) {
    const Index r = find_root(parent, i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

}  // namespace detail

/// Eigenvalues ascending with orthonormal eigenvector columns.
///
/// Entries that are exactly zero are treated as structural: each connected
/// block of the coupling graph is diagonalized on its own, so eigenvectors
/// never mix symmetry sectors through roundoff.
inline EigenDecomposition eigh(const ComplexMatrix& h, double tol = kHermitianTol) {
  require_hermitian(h, tol, "eigh");
  const Index d = h.rows();
  const ComplexMatrix hs = (h + h.adjoint()) / 2.0;

  RealVector values(d);
  ComplexMatrix vectors = ComplexMatrix::Zero(d, d);
  Index col = 0;
  for (const auto& block : detail::coupling_blocks(hs)) {
    const Index m = static_cast<Index>(block.size());
    ComplexMatrix sub(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) sub(i, j) = hs(block[i], block[j]);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sub);
    if (es.info() != Eigen::Success) throw NumericalError("eigh: eigensolver did not converge");
    for (Index k = 0; k < m; ++k, ++col) {
      values(col) = es.eigenvalues()(k);
      for (Index i = 0; i < m; ++i) vectors(block[i], col) = es.eigenvectors()(i, k);
    }
  }

  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a) < values(b); });
  EigenDecomposition out{RealVector(d), ComplexMatrix(d, d)};
  for (Index k = 0; k < d; ++k) {
    out.values(k) = values(order[k]);
    out.vectors.col(k) = vectors.col(order[k]);
  }
  return out;
}

/// Precomputed spectral decomposition producing e^{-i h t} for many t.
class HermitianPropagator {
 public:
  explicit HermitianPropagator(const ComplexMatrix& h, double tol = kHermitianTol)
      : eig_(eigh(h, tol)) {}

  ComplexMatrix at(double t) const {
    ComplexVector phases(eig_.values.size());
    for (Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(-kI * (eig_.values(k) * t));
    return eig_.vectors * phases.asDiagonal() * eig_.vectors.adjoint();
  }

  const EigenDecomposition& decomposition() const noexcept { return eig_; }

 private:
  EigenDecomposition eig_;
};

/// e^{-i h t} through the spectral decomposition of h.
inline ComplexMatrix expm_unitary(const ComplexMatrix& h, double t) {
  return HermitianPropagator(h).at(t);
}

/// General matrix exponential: scaling and squaring with a degree-13 Pade
/// approximant (Higham 2005 coefficients, no balancing).
inline ComplexMatrix expm_general(const ComplexMatrix& a) {
  require_square(a, "expm_general");
  static constexpr double b[] = {64764752532480000.0,
                                 32382376266240000.0,
                                 7771770303897600.0,
                                 1187353796428800.0,
                                 129060195264000.0,
                                 10559470521600.0,
                                 670442572800.0,
                                 33522128640.0,
                                 1323241920.0,
                                 40840800.0,
                                 960960.0,
                                 16380.0,
                                 182.0,
                                 1.0};
  constexpr double theta13 = 5.371920351148152;

  const Index d = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const ComplexMatrix x = a / std::ldexp(1.0, s);

  const ComplexMatrix id = identity(d);
  const ComplexMatrix x2 = x * x;
  const ComplexMatrix x4 = x2 * x2;
  const ComplexMatrix x6 = x4 * x2;
  const ComplexMatrix u_inner = x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 +
                                b[5] * x4 + b[3] * x2 + b[1] * id;
  const ComplexMatrix u = x * u_inner;
  const ComplexMatrix v = x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 +
                          b[2] * x2 + b[0] * id;
  ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

}  // namespace tcrystal
