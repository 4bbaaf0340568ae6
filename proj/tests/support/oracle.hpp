// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// Test-side reference machinery: a channel/estimation simulator written
// directly from the signal model (vec(H) = R^{1/2} w, explicit Kronecker
// pilot transforms, dense inverses) and Monte-Carlo moment accumulators with
// per-entry standard errors.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/scenario.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo::testing {

using Gen = std::mt19937_64;

inline cd cn(Gen& g) {
  std::normal_distribution<double> d(0.0, std::sqrt(0.5));
  const double re = d(g);
  return {re, d(g)};
}

inline CMat cn_matrix(int rows, int cols, Gen& g) {
  CMat x(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) x(i, j) = cn(g);
  return x;
}

/// Random Hermitian PSD matrix of rank `rank` scaled to unit trace per dim.
inline CMat random_psd(int dim, Gen& g, int rank = -1) {
  if (rank < 0) rank = dim + 2;
  const CMat x = cn_matrix(dim, rank, g);
  CMat a = x * x.adjoint() / static_cast<double>(rank);
  return 0.5 * (a + a.adjoint());
}

/// Principal square root straight from Eigen's Hermitian eigensolver.
inline CMat psd_sqrt(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (a + a.adjoint()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// Explicit F^T (x) I_L by entries.
inline CMat kron_transform(const CMat& f, int l) {
  const int n = static_cast<int>(f.rows());
  CMat out = CMat::Zero(n * l, n * l);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int j = 0; j < l; ++j) out(a * l + j, b * l + j) = f(b, a);
  return out;
}

inline CVec column_stack(const CMat& h) {
  CVec v(h.size());
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i) v(j * h.rows() + i) = h(i, j);
  return v;
}

inline CMat column_unstack(const CVec& v, int rows, int cols) {
  CMat h(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) h(i, j) = v(j * rows + i);
  return h;
}

/// Reference simulator of one drop: statistics and joint realizations of
/// (H, H_hat) computed from the raw model definitions.
class OracleSystem {
 public:
  explicit OracleSystem(const SystemModel& model)
      : m_(model.m()), k_(model.k()), l_(model.l()), n_(model.n()),
        tau_(model.tau_p()), sigma2_(model.cfg.sigma2),
        group_(model.plan.group) {
    const int dim = l_ * n_;
    for (int ue = 0; ue < k_; ++ue) ft_.push_back(kron_transform(model.f_p[ue], l_));
    for (int ap = 0; ap < m_; ++ap) {
      for (int ue = 0; ue < k_; ++ue) {
        const CMat& r = model.r(ap, ue);
        r_.push_back(r);
        r_sqrt_.push_back(psd_sqrt(r));
      }
    }
    for (int ap = 0; ap < m_; ++ap) {
      for (int ue = 0; ue < k_; ++ue) {
        CMat psi = sigma2_ * CMat::Identity(dim, dim);
        for (int j = 0; j < k_; ++j) {
          if (group_[j] != group_[ue]) continue;
          psi += tau_ * ft_[j] * r_[idx(ap, j)] * ft_[j].adjoint();
        }
        const CMat psi_inv = psi.fullPivLu().inverse();
        const CMat est = r_[idx(ap, ue)] * ft_[ue].adjoint() * psi_inv;
        psi_.push_back(psi);
        estimator_.push_back(est);
        r_hat_.push_back(tau_ * est * ft_[ue] * r_[idx(ap, ue)]);
      }
    }
  }

  int m() const { return m_; }
  int k() const { return k_; }
  int l() const { return l_; }
  int n() const { return n_; }
  std::size_t idx(int ap, int ue) const { return static_cast<std::size_t>(ap * k_ + ue); }
  const CMat& r(int ap, int ue) const { return r_[idx(ap, ue)]; }
  const CMat& psi(int ap, int ue) const { return psi_[idx(ap, ue)]; }
  const CMat& r_hat(int ap, int ue) const { return r_hat_[idx(ap, ue)]; }

  /// One joint draw: h[m*K+k] and h_hat[m*K+k] as L x N matrices.
  void draw(Gen& g, std::vector<CMat>& h, std::vector<CMat>& h_hat) const {
    const int dim = l_ * n_;
    h.resize(static_cast<std::size_t>(m_ * k_));
    h_hat.resize(h.size());
    std::vector<CVec> hv(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
      hv[i] = r_sqrt_[i] * cn_matrix(dim, 1, g);
      h[i] = column_unstack(hv[i], l_, n_);
    }
    const int groups = *std::max_element(group_.begin(), group_.end()) + 1;
    const double noise_std = std::sqrt(tau_ * sigma2_);
    for (int ap = 0; ap < m_; ++ap) {
      for (int gr = 0; gr < groups; ++gr) {
        CVec y = noise_std * cn_matrix(dim, 1, g);
        for (int j = 0; j < k_; ++j) {
          if (group_[j] == gr) y += tau_ * ft_[j] * hv[idx(ap, j)];
        }
        for (int ue = 0; ue < k_; ++ue) {
          if (group_[ue] != gr) continue;
          h_hat[idx(ap, ue)] = column_unstack(estimator_[idx(ap, ue)] * y, l_, n_);
        }
      }
    }
  }

 private:
  int m_, k_, l_, n_;
  double tau_, sigma2_;
  std::vector<int> group_;
  std::vector<CMat> ft_, r_, r_sqrt_, psi_, estimator_, r_hat_;
};

/// Running mean and per-entry variance (Welford) of complex matrices.
class MomentAccumulator {
 public:
  void add(const CMat& x) {
    if (count_ == 0) {
      mean_ = CMat::Zero(x.rows(), x.cols());
      m2_re_ = RMat::Zero(x.rows(), x.cols());
      m2_im_ = RMat::Zero(x.rows(), x.cols());
    }
    ++count_;
    const CMat delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    const CMat delta2 = x - mean_;
    m2_re_ += delta.real().cwiseProduct(delta2.real());
    m2_im_ += delta.imag().cwiseProduct(delta2.imag());
  }
  long count() const { return count_; }
  const CMat& mean() const { return mean_; }
  /// sqrt((var_re + var_im) / n) per entry.
  RMat standard_error() const {
    const double n = static_cast<double>(count_);
    return ((m2_re_ + m2_im_) / ((n - 1.0) * n)).cwiseSqrt();
  }

 private:
  long count_ = 0;
  CMat mean_;
  RMat m2_re_, m2_im_;
};

struct SeComparison {
  double worst_z = 0.0;  // max |mean - exact| / se over entries
  int row = -1;
  int col = -1;
  std::string describe() const {
    std::ostringstream s;
    s << "worst deviation " << worst_z << " standard errors at (" << row << ", " << col << ")";
    return s.str();
  }
};

/// Entries whose standard error falls below `se_floor` are compared against
/// that floor instead (exactly-zero expectations of degenerate entries).
inline SeComparison compare_to_exact(const MomentAccumulator& acc, const CMat& exact,
                                     double se_floor) {
  SeComparison out;
  const RMat se = acc.standard_error();
  for (Eigen::Index i = 0; i < exact.rows(); ++i) {
    for (Eigen::Index j = 0; j < exact.cols(); ++j) {
      const double z = std::abs(acc.mean()(i, j) - exact(i, j)) / std::max(se(i, j), se_floor);
      if (z > out.worst_z) {
        out.worst_z = z;
        out.row = static_cast<int>(i);
        out.col = static_cast<int>(j);
      }
    }
  }
  return out;
}

/// Network with every pair synthesized at a chosen large-scale gain.
inline Network synthetic_network(int m, int k, int l, int n,
                                 const std::vector<double>& beta,
                                 std::uint64_t seed, double dominance = 0.0) {
  Network net;
  net.m = m;
  net.k = k;
  net.l = l;
  net.n = n;
  net.drop.area_side = 1000.0;
  net.drop.aps.assign(static_cast<std::size_t>(m), Point{});
  net.drop.ues.assign(static_cast<std::size_t>(k), Point{});
  for (int ap = 0; ap < m; ++ap) {
    for (int ue = 0; ue < k; ++ue) {
      net.pairs.push_back(synthesize_coupling(
          l, n, beta[static_cast<std::size_t>(ap * k + ue)],
          seed * 1000003ULL + static_cast<std::uint64_t>(ap * k + ue), dominance));
    }
  }
  return net;
}

/// Small model in which every pair has a comparable SNR, so pilot
/// contamination and fourth-moment terms are clearly visible.
inline SystemModel small_model(int m, int k, int l, int n, int tau_p,
                               std::uint64_t seed, double snr_spread = 4.0) {
  SystemConfig cfg;
  cfg.m = m;
  cfg.k = k;
  cfg.l = l;
  cfg.n = n;
  cfg.tau_p = tau_p;
  Gen g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> beta;
  // p / sigma2 is about 5e11; gains around 1e-11 put per-antenna SNR near 5.
  for (int i = 0; i < m * k; ++i) beta.push_back(1e-11 * std::pow(snr_spread, u(g) - 0.5));
  return build_model(cfg, synthetic_network(m, k, l, n, beta, seed));
}

}  // namespace cfmimo::testing
