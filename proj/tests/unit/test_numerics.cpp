// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "cfmimo/numerics.hpp"
#include "oracle.hpp"

using namespace cfmimo;
using namespace cfmimo::testing;

namespace {

double rel(const CMat& a, const CMat& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

// Cofactor expansion, kept deliberately naive.
cd det_cofactor(const CMat& a) {
  const auto n = a.rows();
  if (n == 1) return a(0, 0);
  cd acc(0.0, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    CMat minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = a(r, c);
      }
    }
    acc += ((j % 2 == 0) ? 1.0 : -1.0) * a(0, j) * det_cofactor(minor);
  }
  return acc;
}

CMat adjugate_inverse(const CMat& a) {
  const auto n = a.rows();
  CMat adj(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      CMat minor(n - 1, n - 1);
      for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = a(r, c);
        }
        ++rr;
      }
      adj(j, i) = (((i + j) % 2 == 0) ? 1.0 : -1.0) * det_cofactor(minor);
    }
  }
  return adj / det_cofactor(a);
}

CMat explicit_kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      out(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
  return out;
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("hermitian_sqrt: identity and diagonal cases") {
  CHECK(rel(hermitian_sqrt(CMat::Identity(4, 4)), CMat::Identity(4, 4)) < 1e-15);
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const CMat s = hermitian_sqrt(d);
  CHECK(std::abs(s(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(s(1, 1) - 3.0) < 1e-14);
  CHECK(std::abs(s(0, 1)) < 1e-14);
}

TEST_CASE("hermitian_sqrt reconstructs random PSD matrices up to dimension 64") {
  Gen g(1);
  for (int dim : {1, 2, 6, 17, 33, 64}) {
    for (int rank : {dim, std::max(1, dim / 2)}) {
      const CMat a = random_psd(dim, g, rank);
      const CMat b = hermitian_sqrt(a);
      CHECK(rel(b * b, a) <= 1e-9);
      CHECK(hermitian_residual(b) <= 1e-12);
      Eigen::SelfAdjointEigenSolver<CMat> es(b);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
    }
  }
}

TEST_CASE("hermitian_sqrt rejects non-Hermitian and indefinite input") {
  CMat a = CMat::Identity(2, 2);
  a(0, 1) = 0.5;
  CHECK_THROWS_AS(hermitian_sqrt(a), NumericsError);
  CMat b = CMat::Identity(2, 2);
  b(1, 1) = -1.0;
  CHECK_THROWS_AS(hermitian_sqrt(b), NumericsError);
}

TEST_CASE("solve_hpd: identity, diagonal and random systems") {
  Gen g(2);
  const CMat b = cn_matrix(3, 2, g);
  CHECK(rel(solve_hpd(CMat::Identity(3, 3), b), b) < 1e-15);

  const CMat d = 2.0 * CMat::Identity(2, 2);
  const CMat x = solve_hpd(d, CMat::Ones(2, 1));
  CHECK(std::abs(x(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(x(1, 0) - 0.5) < 1e-15);

  const CMat a = random_psd(4, g) + 0.1 * CMat::Identity(4, 4);
  const CMat rhs = cn_matrix(4, 3, g);
  const CMat sol = solve_hpd(a, rhs);
  CHECK(rel(sol, adjugate_inverse(a) * rhs) < 1e-9);
  CHECK(rel(a * sol, rhs) < 1e-9);
}

TEST_CASE("solve_hpd residual on larger random systems") {
  Gen g(3);
  for (int dim : {5, 12, 40}) {
    const CMat a = random_psd(dim, g);
    const CMat rhs = cn_matrix(dim, 4, g);
    CHECK(rel(a * solve_hpd(a, rhs), rhs) <= 1e-9);
  }
}

TEST_CASE("solve_hpd rejects mismatched and indefinite systems") {
  CHECK_THROWS_AS(solve_hpd(CMat::Identity(3, 3), CMat::Ones(2, 1)), NumericsError);
  CMat neg = -CMat::Identity(2, 2);
  CHECK_THROWS_AS(solve_hpd(neg, CMat::Ones(2, 1)), NumericsError);
}

TEST_CASE("solve_hpd repairs a numerically semidefinite matrix") {
  Gen g(4);
  const CMat v = cn_matrix(4, 2, g);
  const CMat a = v * v.adjoint();  // rank 2
  const CMat rhs = a * cn_matrix(4, 1, g);
  const CMat x = solve_hpd(a, rhs);
  CHECK(x.allFinite());
  CHECK(rel(a * x, rhs) < 1e-6);
}

TEST_CASE("log2_det_hpd agrees with the cofactor determinant") {
  Gen g(5);
  const CMat a = random_psd(4, g) + CMat::Identity(4, 4);
  CHECK(std::abs(log2_det_hpd(a) - std::log2(det_cofactor(a).real())) < 1e-12);
  CHECK_THROWS_AS(log2_det_hpd(-CMat::Identity(2, 2)), NumericsError);
}

TEST_CASE("kron_vec: identity, scalar and random cases") {
  Gen g(6);
  const CMat x = cn_matrix(3, 2, g);
  CHECK(rel(kron_vec(CMat::Identity(2, 2), CMat::Identity(3, 3), x), x) < 1e-15);

  CMat two(1, 1);
  two(0, 0) = 2.0;
  const CMat v = cn_matrix(2, 1, g);
  CHECK(rel(kron_vec(two, CMat::Identity(2, 2), v), 2.0 * v) < 1e-15);

  for (int t = 0; t < 20; ++t) {
    const CMat a = cn_matrix(3, 3, g), b = cn_matrix(2, 2, g), xx = cn_matrix(2, 3, g);
    const CVec expect = explicit_kron(a, b) * column_stack(xx);
    CHECK((column_stack(kron_vec(a, b, xx)) - expect).norm() <= 1e-12 * expect.norm());
    CHECK(rel(kron(a, b), explicit_kron(a, b)) == 0.0);
  }
  CHECK_THROWS_AS(kron_vec(CMat::Identity(2, 2), CMat::Identity(3, 3), cn_matrix(2, 2, g)),
                  NumericsError);
}

TEST_CASE("vec and unvec stack columns") {
  Gen g(7);
  const CMat x = cn_matrix(3, 4, g);
  CHECK((vec(x) - column_stack(x)).norm() == 0.0);
  CHECK(rel(unvec(vec(x), 3, 4), x) == 0.0);
  CHECK_THROWS_AS(unvec(vec(x), 5, 2), NumericsError);
}

TEST_CASE("block indexing") {
  const CMat eye = CMat::Identity(6, 6);
  for (int n = 0; n < 3; ++n) CHECK(rel(block(eye, n, n, 2), CMat::Identity(2, 2)) == 0.0);
  CHECK(block(eye, 0, 1, 2).norm() == 0.0);
  CHECK_THROWS_AS(block(eye, 3, 0, 2), NumericsError);
  CHECK_THROWS_AS(block(eye, 0, -1, 2), NumericsError);
  CHECK_THROWS_AS(block(CMat::Identity(5, 5), 0, 0, 2), NumericsError);

  Gen g(8);
  const CMat x = cn_matrix(6, 6, g);
  for (int n = 0; n < 3; ++n)
    for (int i = 0; i < 3; ++i) {
      CHECK(rel(block(x, n, i, 2).adjoint(), block(x.adjoint(), i, n, 2)) == 0.0);
      CHECK(block_trace(x, n, i, 2) == block(x, n, i, 2).trace());
    }
}

TEST_CASE("block of a correlation matrix is the per-antenna cross-covariance") {
  Gen g(9);
  const int l = 2, n = 2;
  const CMat r = random_psd(l * n, g, 3);
  const CMat rs = psd_sqrt(r);
  std::vector<MomentAccumulator> acc(4);
  for (int s = 0; s < 100000; ++s) {
    const CMat h = column_unstack(rs * cn_matrix(l * n, 1, g), l, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc[a * n + b].add(h.col(a) * h.col(b).adjoint());
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto cmp = compare_to_exact(acc[a * n + b], block(r, a, b, l), 1e-300);
      INFO(cmp.describe());
      CHECK(cmp.worst_z < 4.5);
    }
}

TEST_CASE("block_diagonal places blocks on the diagonal") {
  const CMat d = block_diagonal({CMat::Ones(1, 1), 2.0 * CMat::Ones(2, 2)});
  CHECK(d.rows() == 3);
  CHECK(d(0, 0) == cd(1.0, 0.0));
  CHECK(d(2, 1) == cd(2.0, 0.0));
  CHECK(d(0, 2) == cd(0.0, 0.0));
}

}  // TEST_SUITE
