// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// Pilot assignment, channel sampling and MMSE channel estimation.

#pragma once

#include <cstdint>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/scenario.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

struct PilotPlan {
  int tau_p = 0;
  int n = 0;
  /// Pilot matrix index of each UE.
  std::vector<int> group;
  /// P_k: UEs sharing the pilot matrix of UE k (including k), ascending.
  std::vector<std::vector<int>> copilots;

  int pilot_count() const { return tau_p / n; }
  int ue_count() const { return static_cast<int>(group.size()); }
  bool shares_pilot(int a, int b) const {
    return group[static_cast<std::size_t>(a)] == group[static_cast<std::size_t>(b)];
  }
};

/// Round-robin assignment of tau_p / n mutually orthogonal pilot matrices.
PilotPlan assign_pilots(int k_total, int n, int tau_p);

/// F~ = F^T (x) I_L, acting on vec(H) as vec(H F).
CMat pilot_transform(const CMat& f, int l);

/// sqrt(p_k / N) I_N for every UE.
std::vector<CMat> scaled_identity_precoders(const SystemConfig& cfg);

/// H = U_r (Omega~ .* H_iid) U_t^H.
CMat sample_channel(const PairCorrelation& pc, Rng& rng);
CMat sample_channel(const PairCorrelation& pc, std::uint64_t seed);

/// Pilot-phase second-order statistics, indexed by pair m * K + k.
struct EstimationStatistics {
  int m = 0;
  int k = 0;
  int l = 0;
  int n = 0;
  int tau_p = 0;
  std::vector<CMat> psi;        // sum_{j in P_k} tau_p F~_j R_mj F~_j^H + sigma2 I
  std::vector<CMat> r_hat;      // tau_p R F~_k^H Psi^{-1} F~_k R
  std::vector<CMat> c;          // R - r_hat
  std::vector<CMat> estimator;  // R F~_k^H Psi^{-1}, maps y^p to h_hat

  std::size_t index(int ap, int ue) const {
    return static_cast<std::size_t>(ap * k + ue);
  }
};

EstimationStatistics pilot_statistics(const Network& net, const PilotPlan& plan,
                                      const std::vector<CMat>& f_p,
                                      double sigma2);

/// One joint draw of every channel and its estimate, indexed by pair.
struct ChannelRealization {
  std::vector<CMat> h;        // L x N
  std::vector<CMat> h_hat;    // L x N
  std::vector<CMat> h_tilde;  // h - h_hat
};

/// y_m^p for every (AP, pilot group), stored at m * pilot_count + g, with
/// q ~ CN(0, tau_p sigma2 I). A null `noise` yields the noiseless projection.
std::vector<CVec> pilot_observations(const std::vector<CMat>& h_all,
                                     const Network& net, const PilotPlan& plan,
                                     const std::vector<CMat>& f_p,
                                     double sigma2, Rng* noise);

/// h_hat = R F~^H Psi^{-1} y for every pair; `h_all` holds the true channels.
ChannelRealization mmse_estimate(const std::vector<CMat>& h_all,
                                 const Network& net,
                                 const EstimationStatistics& est,
                                 const PilotPlan& plan,
                                 const std::vector<CMat>& f_p, double sigma2,
                                 Rng& noise);

/// Everything downstream stages need about one drop.
struct SystemModel {
  SystemConfig cfg;
  Network net;
  PilotPlan plan;
  std::vector<CMat> f_p;
  EstimationStatistics est;

  int m() const { return net.m; }
  int k() const { return net.k; }
  int l() const { return net.l; }
  int n() const { return net.n; }
  int tau_p() const { return plan.tau_p; }
  const CMat& r(int ap, int ue) const { return net.pair(ap, ue).r_full; }
};

SystemModel build_model(const SystemConfig& cfg, Network net,
                        std::vector<CMat> f_p = {});
SystemModel build_model(const SystemConfig& cfg, std::uint64_t drop_seed);

/// Draws realization `index` of the stream identified by `seed`: channels of
/// every pair followed by the pilot noise, all from one generator.
void draw_realization(const SystemModel& model, std::uint64_t seed,
                      std::uint64_t index, ChannelRealization& out);

}  // namespace cfmimo
