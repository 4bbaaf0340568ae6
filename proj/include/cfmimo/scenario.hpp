// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// Network geometry, large-scale fading and per-pair Weichselberger
// statistics. A pair (m, k) is stored at index m * K + k.

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cfmimo/config.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

inline constexpr double kPathLossInterceptDb = -30.5;
inline constexpr double kPathLossSlopeDb = 36.7;
inline constexpr double kShadowStdDb = 4.0;
inline constexpr double kHeightOffset = 10.0;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct NetworkDrop {
  double area_side = 1000.0;
  std::vector<Point> aps;
  std::vector<Point> ues;
};

/// Jointly correlated (Weichselberger) statistics of one AP-UE pair.
struct PairCorrelation {
  CMat u_r;       // L x L receive eigenbasis
  CMat u_t;       // N x N transmit eigenbasis
  RMat omega;     // L x N eigenmode coupling powers
  CMat r_full;    // LN x LN full correlation of vec(H)
  double beta = 0.0;

  int antennas_ap() const { return static_cast<int>(u_r.rows()); }
  int antennas_ue() const { return static_cast<int>(u_t.rows()); }
};

/// Uniform AP and UE positions in [0, area_side)^2.
NetworkDrop drop_network(int m, int k, double area_side, std::uint64_t seed);
inline NetworkDrop drop_network(const SystemConfig& cfg, std::uint64_t seed) {
  return drop_network(cfg.m, cfg.k, cfg.area_side, seed);
}

/// Wrap-around distance: minimum over the 9 shifted copies of the UE, with
/// the fixed height offset added in quadrature.
double pairwise_distance(const NetworkDrop& drop, int m, int k);

/// Linear gain of -30.5 - 36.7 log10(d) + 4 * shadow [dB].
double large_scale_fading(double distance, double shadow);

/// R = (U_t^* (x) U_r) diag(vec(Omega)) (U_t^* (x) U_r)^H.
CMat full_correlation(const CMat& u_r, const CMat& u_t, const RMat& omega);
CMat full_correlation(const PairCorrelation& pc);

/// Builds a pair from its eigenbases and coupling; beta = ||Omega||_1 / (LN).
PairCorrelation make_pair(CMat u_r, CMat u_t, RMat omega);

/// Random coupling with one dominant transmit eigendirection, scaled so that
/// ||Omega||_1 = l n beta. `dominance` <= 0 selects 2 l n.
PairCorrelation synthesize_coupling(int l, int n, double beta,
                                    std::uint64_t seed, double dominance = 0.0);

/// Unitary eigenvector matrix of a random complex Hermitian Gaussian matrix.
CMat random_unitary(int dim, Rng& rng);

/// A drop together with the statistics of every AP-UE pair.
struct Network {
  int m = 0;
  int k = 0;
  int l = 0;
  int n = 0;
  NetworkDrop drop;
  std::vector<PairCorrelation> pairs;

  const PairCorrelation& pair(int ap, int ue) const {
    return pairs[static_cast<std::size_t>(ap * k + ue)];
  }
};

/// Geometry, shadowing and coupling for every pair, each drawn from its own
/// sub-stream of `seed`.
Network generate_network(const SystemConfig& cfg, std::uint64_t seed);

/// JSON snapshot; complex numbers are [re, im] pairs, matrices row-major
/// arrays of rows.
nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

}  // namespace cfmimo
