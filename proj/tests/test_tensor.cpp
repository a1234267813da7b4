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

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "tcrystal/tensor.hpp"

namespace tc = tcrystal;

namespace {

double diff(const tc::ComplexMatrix& a, const tc::ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

TEST(Kron, MatchesLoopOracle) {
  std::mt19937_64 gen(1);
  for (auto [r1, c1, r2, c2] : {std::tuple{2, 2, 2, 2}, {2, 3, 4, 1}, {1, 5, 3, 2}, {4, 4, 2, 2}}) {
    const auto a = oracle::random_matrix(r1, c1, gen);
    const auto b = oracle::random_matrix(r2, c2, gen);
    EXPECT_LT(diff(tc::kron(a, b), oracle::kron(a, b)), 1e-15);
  }
}

TEST(Kron, KnownTwoQubitProduct) {
  const auto zz = tc::kron(oracle::sz(), oracle::sz());
  tc::ComplexMatrix expect = tc::ComplexMatrix::Zero(4, 4);
  expect.diagonal() << 1, -1, -1, 1;
  EXPECT_EQ(diff(zz, expect), 0.0);
}

TEST(Commutator, PauliAlgebra) {
  // [sx, sy] = 2i sz
  EXPECT_LT(diff(tc::commutator(oracle::sx(), oracle::sy()), 2.0 * tc::kI * oracle::sz()), 1e-15);
  EXPECT_THROW(tc::commutator(oracle::sx(), tc::identity(4)), tc::DimensionError);
}

TEST(Vec, ColumnStackingAndRoundTrip) {
  tc::ComplexMatrix m(2, 2);
  m << 1, 2, 3, 4;
  const auto v = tc::vec(m);
  EXPECT_EQ(v(0), tc::Complex(1));
  EXPECT_EQ(v(1), tc::Complex(3));
  EXPECT_EQ(v(2), tc::Complex(2));
  std::mt19937_64 gen(2);
  for (int d : {1, 2, 3, 8, 16}) {
    const auto a = oracle::random_matrix(d, d, gen);
    EXPECT_EQ(diff(tc::unvec(tc::vec(a), d), a), 0.0);
  }
  EXPECT_THROW(tc::unvec(tc::ComplexVector::Zero(5), 2), tc::DimensionError);
}

TEST(Vec, SandwichIdentity) {
  // vec(A X B) = (B^T (x) A) vec(X)
  std::mt19937_64 gen(3);
  const auto a = oracle::random_matrix(3, 3, gen), x = oracle::random_matrix(3, 3, gen),
             b = oracle::random_matrix(3, 3, gen);
  EXPECT_LT((tc::vec(a * x * b) - oracle::kron(b.transpose(), a) * tc::vec(x)).norm(), 1e-12);
}

TEST(FrobeniusInner, IsTraceOfAdjointProduct) {
  std::mt19937_64 gen(4);
  const auto a = oracle::random_matrix(4, 4, gen), b = oracle::random_matrix(4, 4, gen);
  EXPECT_LT(std::abs(tc::frobenius_inner(a, b) - (a.adjoint() * b).trace()), 1e-12);
}

TEST(PartialTrace, MatchesIndexOracle) {
  std::mt19937_64 gen(5);
  const int n = 4;
  const auto rho = oracle::random_state(16, gen);
  for (const std::vector<int>& keep : {std::vector<int>{1}, {2}, {4}, {1, 3}, {2, 4}, {1, 2, 3}, {1, 2, 3, 4}}) {
    const auto got = tc::partial_trace(rho, n, keep);
    EXPECT_LT(diff(got, oracle::partial_trace(rho, n, keep)), 1e-14);
  }
}

TEST(PartialTrace, ProductStateFactorizes) {
  std::mt19937_64 gen(6);
  const auto a = oracle::random_state(2, gen), b = oracle::random_state(4, gen);
  const tc::DensityMatrix rho(oracle::kron(a, b));
  EXPECT_LT(diff(tc::partial_trace(rho, 3, {1}).matrix(), a), 1e-14);
  EXPECT_LT(diff(tc::partial_trace(rho, 3, {2, 3}).matrix(), b), 1e-14);
  // Order of `keep` does not permute the output.
  EXPECT_LT(diff(tc::partial_trace(rho, 3, {3, 2}).matrix(), b), 1e-14);
}

TEST(PartialTrace, Errors) {
  const auto rho = tc::identity(8) / 8.0;
  const std::vector<int> bad{0};
  const std::vector<int> none;
  EXPECT_THROW(tc::partial_trace(rho, 3, bad), tc::InvalidArgument);
  EXPECT_THROW(tc::partial_trace(rho, 3, none), tc::InvalidArgument);
  EXPECT_THROW(tc::partial_trace(rho, 2, std::vector<int>{1}), tc::DimensionError);
}

TEST(DensityMatrix, ValidatesInput) {
  tc::ComplexMatrix m = tc::identity(2) / 2.0;
  EXPECT_NO_THROW(tc::DensityMatrix{m});
  tc::ComplexMatrix non_herm = m;
  non_herm(0, 1) = 0.1;
  EXPECT_THROW(tc::DensityMatrix{non_herm}, tc::InvalidArgument);
  EXPECT_THROW(tc::DensityMatrix{tc::ComplexMatrix(tc::identity(2))}, tc::InvalidArgument);
  const auto mixed = tc::DensityMatrix::maximally_mixed(4);
  EXPECT_NEAR(mixed.purity(), 0.25, 1e-15);
  EXPECT_NEAR(mixed.min_eigenvalue(), 0.25, 1e-15);
  tc::StateVector psi(2);
  psi << 1.0, 1.0;
  const auto plus = tc::DensityMatrix::pure(psi);
  EXPECT_NEAR(plus.purity(), 1.0, 1e-15);
  EXPECT_NEAR(plus.expectation(oracle::sx()), 1.0, 1e-15);
  EXPECT_NEAR(plus.expectation(oracle::sz()), 0.0, 1e-15);
}

TEST(Eigh, ReconstructsAndSorts) {
  std::mt19937_64 gen(7);
  for (int d : {1, 2, 5, 16, 33}) {
    const auto h = oracle::random_hermitian(d, gen);
    const auto e = tc::eigh(h);
    for (int i = 1; i < d; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
    const tc::ComplexMatrix rec = e.vectors * e.values.cast<tc::Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LT(diff(rec, h), 1e-12);
    EXPECT_LT(diff(e.vectors.adjoint() * e.vectors, tc::identity(d)), 1e-12);
  }
}

TEST(Eigh, BlockStructureKeepsExactZeros) {
  // Two decoupled blocks: eigenvectors must not mix them.
  std::mt19937_64 gen(8);
  const auto a = oracle::random_hermitian(3, gen), b = oracle::random_hermitian(2, gen);
  tc::ComplexMatrix h = tc::ComplexMatrix::Zero(5, 5);
  const int ia[] = {0, 2, 4}, ib[] = {1, 3};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h(ia[i], ia[j]) = a(i, j);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) h(ib[i], ib[j]) = b(i, j);
  const auto e = tc::eigh(h);
  for (int c = 0; c < 5; ++c) {
    const bool in_a = std::abs(e.vectors(0, c)) + std::abs(e.vectors(2, c)) + std::abs(e.vectors(4, c)) > 0;
    const bool in_b = std::abs(e.vectors(1, c)) + std::abs(e.vectors(3, c)) > 0;
    EXPECT_NE(in_a, in_b) << "column " << c;
  }
}

TEST(Eigh, RejectsNonHermitian) {
  tc::ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  EXPECT_THROW(tc::eigh(m), tc::InvalidArgument);
}

TEST(Expm, UnitaryMatchesTaylorOracle) {
  std::mt19937_64 gen(9);
  for (double t : {0.0, 0.3, 2.5, 40.0}) {
    const auto h = oracle::random_hermitian(8, gen);
    const auto u = tc::expm_unitary(h, t);
    EXPECT_LT(diff(u, oracle::expm(-tc::kI * t * h)), 1e-10 * std::max(1.0, t));
    EXPECT_LT(diff(u.adjoint() * u, tc::identity(8)), 1e-12);
  }
}

TEST(Expm, PropagatorGroupProperty) {
  std::mt19937_64 gen(10);
  const auto h = oracle::random_hermitian(6, gen);
  const tc::HermitianPropagator p(h);
  EXPECT_LT(diff(p.at(0.7) * p.at(1.1), p.at(1.8)), 1e-12);
  EXPECT_LT(diff(p.at(0.0), tc::identity(6)), 1e-15);
}

TEST(Expm, GeneralMatchesTaylorOracleAcrossNorms) {
  std::mt19937_64 gen(11);
  for (double scale : {1e-6, 0.1, 1.0, 7.0, 60.0}) {
    const tc::ComplexMatrix a = scale * oracle::random_matrix(6, 6, gen) / 3.0;
    const auto got = tc::expm_general(a);
    const auto want = oracle::expm(a);
    EXPECT_LT(diff(got, want) / std::max(1.0, want.cwiseAbs().maxCoeff()), 1e-10) << "scale " << scale;
  }
}

TEST(Expm, GeneralOnNilpotentAndDiagonal) {
  tc::ComplexMatrix n = tc::ComplexMatrix::Zero(3, 3);
  n(0, 1) = 1.0;
  n(1, 2) = 1.0;
  tc::ComplexMatrix expect = tc::identity(3) + n;
  expect(0, 2) = 0.5;  // I + N + N^2 / 2
  EXPECT_LT(diff(tc::expm_general(n), expect), 1e-14);
  tc::ComplexMatrix d = tc::ComplexMatrix::Zero(2, 2);
  d(0, 0) = -3.0;
  d(1, 1) = tc::Complex(0.0, 2.0);
  const auto e = tc::expm_general(d);
  EXPECT_NEAR(std::abs(e(0, 0) - std::exp(-3.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e(1, 1) - std::exp(tc::Complex(0.0, 2.0))), 0.0, 1e-14);
}

}  // namespace
