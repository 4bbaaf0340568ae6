// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// Dense complex kernels shared by the whole pipeline. LN x LN matrices are
// viewed as N x N grids of L x L blocks, block (n, i) holding E{h_n h_i^H}.
// All block indices are zero-based.

#pragma once

#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kClampTol = 1e-12;
inline constexpr double kRidge = 1e-10;

/// (A + A^H) / 2.
CMat hermitian_part(const CMat& a);

/// Relative symmetry residual ||A - A^H||_F / ||A||_F (zero for A = 0).
double hermitian_residual(const CMat& a);

/// Throws NumericsError unless `a` is square and Hermitian within `tol`.
void require_hermitian(const CMat& a, double tol = kHermitianTol);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues below
/// 1e-12 * lambda_max are clamped to zero; eigenvalues below
/// -1e-10 * lambda_max reject the input as indefinite.
CMat hermitian_sqrt(const CMat& a);

/// Solve A X = B for Hermitian positive definite A. The input is
/// symmetrized first; if the Cholesky factorization fails a ridge of
/// 1e-10 * trace(A) / dim is added (and grown tenfold, up to three times).
CMat solve_hpd(const CMat& a, const CMat& b);

/// Inverse of a Hermitian positive definite matrix via solve_hpd.
CMat inverse_hpd(const CMat& a);

/// log2 det(A) for Hermitian positive definite A.
double log2_det_hpd(const CMat& a);

/// Kronecker product a (x) b.
CMat kron(const CMat& a, const CMat& b);

/// Column-stacking vec(x).
CVec vec(const CMat& x);

/// Inverse of vec for a rows x cols matrix.
CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols);

/// Returns vec^{-1}((a (x) b) vec(x)) = b x a^T without forming a (x) b.
CMat kron_vec(const CMat& a, const CMat& b, const CMat& x);

/// L x L block (n, i) of an LN x LN matrix.
CMat block(const CMat& x, int n, int i, int l);

/// trace of block (n, i).
cd block_trace(const CMat& x, int n, int i, int l);

/// Block-diagonal matrix with the given square blocks.
CMat block_diagonal(const std::vector<CMat>& blocks);

}  // namespace cfmimo
