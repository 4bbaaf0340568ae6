// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace cfmimo {

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double hermitian_residual(const CMat& a) {
  const double scale = a.norm();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / scale;
}

void require_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) {
    throw NumericsError("expected a square matrix, got " +
                        std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
  }
  const double res = hermitian_residual(a);
  if (res > tol) {
    throw NumericsError("matrix is not Hermitian (relative residual " +
                        std::to_string(res) + ")");
  }
}

CMat hermitian_sqrt(const CMat& a) {
  require_hermitian(a);
  if (a.rows() == 0) return a;
  Eigen::SelfAdjointEigenSolver<CMat> eig(hermitian_part(a));
  if (eig.info() != Eigen::Success) {
    throw NumericsError("eigendecomposition failed");
  }
  Eigen::VectorXd lam = eig.eigenvalues();
  const double lam_max = std::max(lam.maxCoeff(), 0.0);
  if (lam.minCoeff() < -kPsdTol * lam_max ||
      (lam_max == 0.0 && lam.minCoeff() < 0.0)) {
    throw NumericsError("matrix is not positive semidefinite");
  }
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    lam(i) = lam(i) <= kClampTol * lam_max ? 0.0 : std::sqrt(lam(i));
  }
  const CMat& u = eig.eigenvectors();
  return hermitian_part(u * lam.cast<cd>().asDiagonal() * u.adjoint());
}

CMat solve_hpd(const CMat& a, const CMat& b) {
  if (a.rows() != a.cols()) throw NumericsError("solve_hpd: non-square system");
  if (a.rows() != b.rows()) {
    throw NumericsError("solve_hpd: dimension mismatch (" +
                        std::to_string(a.rows()) + " vs " +
                        std::to_string(b.rows()) + " rows)");
  }
  CMat h = hermitian_part(a);
  Eigen::LLT<CMat> llt(h);
  if (llt.info() == Eigen::Success) return llt.solve(b);

  const double n = static_cast<double>(h.rows());
  double ridge = kRidge * std::abs(h.trace().real()) / n;
  if (ridge == 0.0) throw NumericsError("solve_hpd: zero matrix");
  for (int attempt = 0; attempt < 4; ++attempt, ridge *= 10.0) {
    CMat reg = h;
    reg.diagonal().array() += ridge;
    llt.compute(reg);
    if (llt.info() == Eigen::Success) return llt.solve(b);
  }
  throw NumericsError("solve_hpd: matrix is indefinite beyond ridge repair");
}

CMat inverse_hpd(const CMat& a) {
  return hermitian_part(solve_hpd(a, CMat::Identity(a.rows(), a.cols())));
}

double log2_det_hpd(const CMat& a) {
  CMat h = hermitian_part(a);
  Eigen::LLT<CMat> llt(h);
  if (llt.info() != Eigen::Success) {
    throw NumericsError("log2_det_hpd: matrix is not positive definite");
  }
  const CMat& lower = llt.matrixL();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    acc += std::log2(lower(i, i).real());
  }
  return 2.0 * acc;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVec vec(const CMat& x) {
  return Eigen::Map<const CVec>(x.data(), x.size());
}

CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != v.size()) throw NumericsError("unvec: size mismatch");
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

CMat kron_vec(const CMat& a, const CMat& b, const CMat& x) {
  if (b.cols() != x.rows() || a.cols() != x.cols()) {
    throw NumericsError("kron_vec: operands are not conformable");
  }
  return b * x * a.transpose();
}

CMat block(const CMat& x, int n, int i, int l) {
  if (l <= 0 || x.rows() != x.cols() || x.rows() % l != 0) {
    throw NumericsError("block: matrix is not an LN x LN block matrix");
  }
  const int nb = static_cast<int>(x.rows() / l);
  if (n < 0 || i < 0 || n >= nb || i >= nb) {
    throw NumericsError("block: index (" + std::to_string(n) + ", " +
                        std::to_string(i) + ") out of range for " +
                        std::to_string(nb) + " blocks");
  }
  return x.block(n * l, i * l, l, l);
}

cd block_trace(const CMat& x, int n, int i, int l) {
  return x.block(n * l, i * l, l, l).trace();
}

CMat block_diagonal(const std::vector<CMat>& blocks) {
  Eigen::Index dim = 0;
  for (const auto& b : blocks) dim += b.rows();
  CMat out = CMat::Zero(dim, dim);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

}  // namespace cfmimo
