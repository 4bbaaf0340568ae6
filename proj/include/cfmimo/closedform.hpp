// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// Closed-form second-order statistics of the effective channels under MR
// combining. Block superscripts X^{ab} denote the (a, b) L x L block of an
// LN x LN matrix; all indices are 0-based.

#pragma once

#include <utility>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/receive.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Variant of the fourth-moment terms that arise for co-pilot UEs.
/// `corrected` is exact for Gaussian channels; `printed` follows the
/// published expression built on the Hermitian square root of P2, which
/// agrees with the exact value only when that root happens to factor as
/// S F~ R^{1/2}.
enum class FourthMomentForm { corrected, printed };

/// Dense N x N x N x N array, index order (a, b, c, d).
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n)
      : n_(n), v_(static_cast<std::size_t>(n) * n * n * n, cd(0.0, 0.0)) {}

  int size() const { return n_; }
  cd& operator()(int a, int b, int c, int d) { return v_[at(a, b, c, d)]; }
  cd operator()(int a, int b, int c, int d) const { return v_[at(a, b, c, d)]; }

 private:
  std::size_t at(int a, int b, int c, int d) const {
    return ((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d;
  }
  int n_ = 0;
  std::vector<cd> v_;
};

/// T(a, b, c, d) = tr(X^{ab} Y^{cd}).
Tensor4 block_trace_table(const CMat& x, const CMat& y, int l);

/// [Z]_{n n'} = tr(R_hat^{n' n}), i.e. E{H_hat^H H_hat}.
CMat z_matrix(const CMat& r_hat, int l);

/// E{h_mc h_hat_me^H} = tau_p R_mc F~_c^H Psi_me^{-1} F~_e R_me; zero when c
/// and e use different pilots.
CMat cross_covariance(const SystemModel& model, int ap, int channel_ue,
                      int estimate_ue);

/// Decomposition of the estimate of UE k at AP m seen from the channel of a
/// co-pilot UE l: h_hat_mk = tau_p S F~_l h_ml + w, with w independent of
/// h_ml, Cov(w) = p1 and tau_p^2 p2 + p1 = R_hat_mk.
struct PairTerms {
  CMat xi;         // E{h_ml h_hat_mk^H}
  CMat s_proj;     // S = R_mk F~_k^H Psi_mk^{-1}
  CMat p1;         // tau_p S (Psi_mk - tau_p F~_l R_ml F~_l^H) S^H
  CMat p2;         // S F~_l R_ml F~_l^H S^H
  CMat r_sqrt;     // R_ml^{1/2}
  CMat p2_sqrt;    // Hermitian P2^{1/2}
  CMat p2_factor;  // S F~_l R_ml^{1/2}; p2_factor p2_factor^H = p2
};

PairTerms xi_p_matrices(const SystemModel& model, int ap, int k, int l);

/// Precomputed F_bar-independent kernels for one drop. Building costs
/// O(M K^2 N^4 L^2); every subsequent query is a cheap contraction.
class ClosedFormContext {
 public:
  explicit ClosedFormContext(const SystemModel& model,
                             FourthMomentForm form = FourthMomentForm::corrected);

  const SystemModel& model() const { return *model_; }
  FourthMomentForm form() const { return form_; }

  /// Z_mk.
  const CMat& z(int ap, int ue) const;
  /// [Lambda_mkl]_{n n'} = tr(Xi^{n' n}) with Xi = E{h_ml h_hat_mk^H}.
  const CMat& lambda(int ap, int k, int l) const;

  /// Gamma1_mkl(F_bar): sum_{i,i'} [F_bar]_{i' i} tr(R_ml^{i' i} R_hat_mk^{n' n}).
  CMat gamma1(int ap, int k, int l, const CMat& f_bar) const;
  /// Gamma2_mkl(F_bar) for l in P_k; equals E{H_hat_mk^H H_ml F_bar H_ml^H H_hat_mk}.
  CMat gamma2(int ap, int k, int l, const CMat& f_bar) const;

  /// E{G_kl F_bar G_kl^H} split into its block-diagonal part (T1) and the
  /// co-pilot cross-AP part (T2, zero unless l in P_k).
  std::pair<CMat, CMat> t_matrices(int k, int l, const CMat& f_bar) const;

  /// [E{g_lk,n g_lk,i^H}]_{(m,p),(m',p')}, g_lk,n the n-th column of G_lk.
  cd gg_second_moment(int ap, int ap2, int l, int k, int n, int i, int p,
                      int p2) const;

  /// E{G_lk^H A_bar G_lk} for an MN x MN weight matrix A_bar.
  CMat weighted_gram(const CMat& a_bar, int l, int k) const;

 private:
  struct Kernel {
    Tensor4 rr;        // tr(R_ml^{ab} R_hat_mk^{cd}), every pair
    Tensor4 g2_third;  // co-pilot fourth-moment term of Gamma2, (n, n', i', i)
    Tensor4 gg_third;  // same term in the (n, i, p, p') layout of g g^H
    CMat lambda;
    bool copilot = false;
  };

  std::size_t key(int ap, int k, int l) const;
  const Kernel& kernel(int ap, int k, int l) const { return kernels_[key(ap, k, l)]; }
  cd diag_entry(const Kernel& q, int n, int i, int p, int p2) const;

  const SystemModel* model_;
  FourthMomentForm form_;
  std::vector<CMat> z_;
  std::vector<CMat> xi_;  // at key(ap, estimate, channel), co-pilot only
  std::vector<Kernel> kernels_;
};

/// (Gamma1, Gamma2) of pair (m, k, l); Gamma2 equals Gamma1 when l and k use
/// different pilots.
std::pair<CMat, CMat> gamma_matrices(const ClosedFormContext& ctx,
                                     const CMat& f_bar, int ap, int k, int l);

/// DecodeStatistics with exact MR expectations for the precoders `f_u`.
DecodeStatistics closed_form_statistics(const ClosedFormContext& ctx,
                                        const std::vector<CMat>& f_u);

struct LsfdResult {
  double se = 0.0;
  CMat a_opt;
  CMat e_opt;
};

/// Optimal LSFD, its MSE matrix and the UatF SE of UE k, all in closed form.
LsfdResult closed_se_lsfd(const ClosedFormContext& ctx,
                          const std::vector<CMat>& f_u, int k);

}  // namespace cfmimo
