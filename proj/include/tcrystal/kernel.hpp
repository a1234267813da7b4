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

// Null spaces of vectorized generators G (G = L for a Liouvillian, G = S - I
// for a channel superoperator) and the stationary state they select.

#pragma once

#include <vector>

#include <Eigen/SVD>

#include "tcrystal/tensor.hpp"

namespace tcrystal {

struct StationarySpace {
  std::vector<ComplexMatrix> basis;  // Hermitian, Hilbert-Schmidt orthonormal
  DensityMatrix canonical;           // spectral projection of I/D onto the kernel
};

namespace detail {

/// Right null vectors of a square matrix: columns whose singular values
/// fall below `tol` relative to max(1, sigma_max). When `count` >= 0 the
/// `count` smallest are taken instead.
struct NullSpaces {
  ComplexMatrix right;
  ComplexMatrix left;
};

inline NullSpaces null_spaces(const ComplexMatrix& g, double tol, Index count = -1) {
  Eigen::BDCSVD<ComplexMatrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();  // descending
  const Index n = s.size();
  Index k = count;
  if (k < 0) {
    const double scale = std::max(1.0, n > 0 ? s(0) : 0.0);
    k = 0;
    while (k < n && s(n - 1 - k) <= tol * scale) ++k;
  }
  return {svd.matrixV().rightCols(k), svd.matrixU().rightCols(k)};
}

/// Gram-Schmidt over the Hermitian and anti-Hermitian parts of the kernel
/// vectors. Valid because the generators here preserve Hermiticity.
inline std::vector<ComplexMatrix> hermitian_basis(const ComplexMatrix& right, Index dim) {
  std::vector<ComplexMatrix> basis;
  const Index k = right.cols();
  for (Index c = 0; c < k && static_cast<Index>(basis.size()) < k; ++c) {
    const ComplexMatrix x = unvec(right.col(c), dim);
    for (const ComplexMatrix& cand : {ComplexMatrix((x + x.adjoint()) / 2.0),
                                      ComplexMatrix((x - x.adjoint()) / Complex(0.0, 2.0))}) {
      ComplexMatrix h = cand;
      for (const auto& b : basis) h -= frobenius_inner(b, h).real() * b;
      const double nrm = h.norm();
      if (nrm > 1e-6 && static_cast<Index>(basis.size()) < k) basis.push_back(h / nrm);
    }
  }
  return basis;
}

}  // namespace detail

/// Stationary space of a Hermiticity-preserving generator `g` acting on
/// vec(rho) of a `dim`-dimensional system.
inline StationarySpace stationary_space(const ComplexMatrix& g, Index dim, double tol,
                                        Index count = -1) {
  const auto ns = detail::null_spaces(g, tol, count);
  if (ns.right.cols() == 0) throw NumericalError("stationary_space: generator has an empty kernel");

  // Oblique projector R (Lf^H R)^{-1} Lf^H onto the kernel along the other
  // invariant subspaces.
  const ComplexVector mixed = vec(identity(dim) / static_cast<double>(dim));
  const ComplexMatrix overlap = ns.left.adjoint() * ns.right;
  const ComplexVector coeff = overlap.fullPivLu().solve(ns.left.adjoint() * mixed);
  ComplexMatrix rho = unvec(ns.right * coeff, dim);
  rho = (rho + rho.adjoint()) / 2.0;
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12) throw NumericalError("stationary_space: projected state has zero trace");
  rho /= tr.real();
  return {detail::hermitian_basis(ns.right, dim), DensityMatrix(rho, 1e-8)};
}

}  // namespace tcrystal
