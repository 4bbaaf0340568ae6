// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// First-layer combining at the APs, LSFD at the CPU, and the UatF
// spectral efficiency. G_kl stacks V_mk^H H_ml over the APs (MN x N).

#pragma once

#include <cstdint>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

CMat mr_combiner(const CMat& h_hat);

/// C' = E{H~ F_bar H~^H} = sum_{p1,p2} [F_bar]_{p2 p1} C^{p2 p1}.
CMat cprime(const CMat& c, const CMat& f_bar, int l);

/// Local MMSE combiner of UE k at one AP:
/// (sum_j (H^_j F_bar_j H^_j^H + C'_j) + sigma2 I)^{-1} H^_k F_k.
CMat lmmse_combiner(const std::vector<CMat>& h_hat_at_ap,
                    const std::vector<CMat>& cprime_at_ap,
                    const std::vector<CMat>& f_u, double sigma2, int k);

/// Combiners of one realization for every pair, stored at m * K + k.
std::vector<CMat> compute_combiners(const SystemModel& model,
                                    const std::vector<CMat>& f_u,
                                    CombinerKind combiner,
                                    const ChannelRealization& realization);

enum class StatsSource { monte_carlo, closed_form };

struct DecodeStatistics {
  int m = 0;
  int k = 0;
  int n = 0;
  std::vector<CMat> g_mean;  // per UE k: E{G_kk}, MN x N
  std::vector<CMat> g_gram;  // at k * K + l: E{G_kl F_bar_l G_kl^H}
  std::vector<CMat> s;       // per UE k: diag_m E{V_mk^H V_mk}
  StatsSource source = StatsSource::monte_carlo;
  int n_r = 0;

  const CMat& gram(int ue, int other) const {
    return g_gram[static_cast<std::size_t>(ue * k + other)];
  }
  /// sum_l E{G_kl F_bar_l G_kl^H}.
  CMat gram_sum(int ue) const;
};

/// Monte-Carlo averages over n_r joint draws of channels and pilot noise.
/// Realizations are reduced in index order, so the result depends only on
/// (model, f_u, combiner, n_r, seed) and not on `workers`.
DecodeStatistics mc_decode_stats(const SystemModel& model,
                                 const std::vector<CMat>& f_u,
                                 CombinerKind combiner, int n_r,
                                 std::uint64_t seed, int workers = 1);

/// E{G_lk^H A_bar_l G_lk} for every (l, k), stored at l * K + k, estimated
/// from the same realization stream as mc_decode_stats.
std::vector<CMat> mc_weighted_grams(const SystemModel& model,
                                    const std::vector<CMat>& f_u,
                                    CombinerKind combiner,
                                    const std::vector<CMat>& a_bar, int n_r,
                                    std::uint64_t seed, int workers = 1);

/// Optimal LSFD weights (sum_l E{G_kl F_bar_l G_kl^H} + sigma2 S_k)^{-1}
/// E{G_kk} F_k.
CMat optimal_lsfd(const DecodeStatistics& stats, const CMat& f_u,
                  double sigma2, int k);

/// Conditional MSE matrix for arbitrary LSFD weights `a`.
CMat mse_matrix(const DecodeStatistics& stats, const CMat& a, const CMat& f_u,
                double sigma2, int k);

/// I - F^H E{G_kk}^H A_opt, valid only for the optimal weights.
CMat optimal_mse_matrix(const DecodeStatistics& stats, const CMat& a_opt,
                        const CMat& f_u, int k);

/// UatF spectral efficiency for LSFD weights `a` [bit/s/Hz].
double uatf_se(const DecodeStatistics& stats, const CMat& a, const CMat& f_u,
               double sigma2, int tau_p, int tau_c, int k);

/// Maximal UatF spectral efficiency, evaluated directly without forming A.
double optimal_se(const DecodeStatistics& stats, const CMat& f_u,
                  double sigma2, int tau_p, int tau_c, int k);

/// Pre-log factor 1 - tau_p / tau_c (zero when tau_p >= tau_c).
double prelog(int tau_p, int tau_c);

}  // namespace cfmimo
