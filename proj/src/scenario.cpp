// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/scenario.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "cfmimo/numerics.hpp"

namespace cfmimo {

NetworkDrop drop_network(int m, int k, double area_side, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::geometry);
  std::uniform_real_distribution<double> coord(0.0, area_side);
  NetworkDrop drop;
  drop.area_side = area_side;
  auto draw = [&] {
    Point p;
    p.x = coord(rng);
    p.y = coord(rng);
    return p;
  };
  for (int i = 0; i < m; ++i) drop.aps.push_back(draw());
  for (int i = 0; i < k; ++i) drop.ues.push_back(draw());
  return drop;
}

double pairwise_distance(const NetworkDrop& drop, int m, int k) {
  const Point& ap = drop.aps.at(static_cast<std::size_t>(m));
  const Point& ue = drop.ues.at(static_cast<std::size_t>(k));
  double best = std::numeric_limits<double>::infinity();
  for (int sx = -1; sx <= 1; ++sx) {
    for (int sy = -1; sy <= 1; ++sy) {
      const double dx = ue.x + sx * drop.area_side - ap.x;
      const double dy = ue.y + sy * drop.area_side - ap.y;
      best = std::min(best, std::hypot(dx, dy));
    }
  }
  return std::hypot(best, kHeightOffset);
}

double large_scale_fading(double distance, double shadow) {
  const double db = kPathLossInterceptDb -
                    kPathLossSlopeDb * std::log10(distance) +
                    kShadowStdDb * shadow;
  return std::pow(10.0, db / 10.0);
}

CMat full_correlation(const CMat& u_r, const CMat& u_t, const RMat& omega) {
  const CMat basis = kron(u_t.conjugate(), u_r);
  const Eigen::VectorXd w =
      Eigen::Map<const Eigen::VectorXd>(omega.data(), omega.size());
  return hermitian_part(basis * w.cast<cd>().asDiagonal() * basis.adjoint());
}

CMat full_correlation(const PairCorrelation& pc) {
  return full_correlation(pc.u_r, pc.u_t, pc.omega);
}

PairCorrelation make_pair(CMat u_r, CMat u_t, RMat omega) {
  PairCorrelation pc;
  pc.u_r = std::move(u_r);
  pc.u_t = std::move(u_t);
  pc.omega = std::move(omega);
  pc.r_full = full_correlation(pc);
  pc.beta = pc.omega.sum() / static_cast<double>(pc.omega.size());
  return pc;
}

CMat random_unitary(int dim, Rng& rng) {
  const CMat g = complex_normal_matrix(dim, dim, rng);
  Eigen::SelfAdjointEigenSolver<CMat> eig(hermitian_part(g));
  return eig.eigenvectors();
}

PairCorrelation synthesize_coupling(int l, int n, double beta,
                                    std::uint64_t seed, double dominance) {
  Rng rng = make_rng(seed, Stream::coupling);
  CMat u_r = random_unitary(l, rng);
  CMat u_t = random_unitary(n, rng);
  RMat omega(l, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < l; ++r) omega(r, c) = std::norm(complex_normal(rng));
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  const double factor = dominance > 0.0 ? dominance : 2.0 * l * n;
  omega.col(pick(rng)) *= factor;
  omega *= (l * n * beta) / omega.sum();
  return make_pair(std::move(u_r), std::move(u_t), std::move(omega));
}

Network generate_network(const SystemConfig& cfg, std::uint64_t seed) {
  Network net;
  net.m = cfg.m;
  net.k = cfg.k;
  net.l = cfg.l;
  net.n = cfg.n;
  net.drop = drop_network(cfg.m, cfg.k, cfg.area_side, seed);
  net.pairs.reserve(static_cast<std::size_t>(cfg.m * cfg.k));
  for (int ap = 0; ap < cfg.m; ++ap) {
    for (int ue = 0; ue < cfg.k; ++ue) {
      Rng shadow_rng = make_rng(seed, Stream::shadowing,
                                static_cast<std::uint64_t>(ap),
                                static_cast<std::uint64_t>(ue));
      std::normal_distribution<double> normal;
      const double beta = large_scale_fading(
          pairwise_distance(net.drop, ap, ue), normal(shadow_rng));
      // Per-pair coupling seed, independent of generation order.
      Rng seeder = make_rng(seed, Stream::coupling,
                            static_cast<std::uint64_t>(ap),
                            static_cast<std::uint64_t>(ue));
      net.pairs.push_back(synthesize_coupling(cfg.l, cfg.n, beta, seeder(),
                                              cfg.dominance_factor()));
    }
  }
  return net;
}

namespace {

nlohmann::json complex_matrix_json(const CMat& x) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      row.push_back({x(r, c).real(), x(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CMat complex_matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  CMat x(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& e = j.at(r).at(c);
      x(r, c) = cd(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return x;
}

}  // namespace

nlohmann::json to_json(const Network& net) {
  nlohmann::json j;
  j["m"] = net.m;
  j["k"] = net.k;
  j["l"] = net.l;
  j["n"] = net.n;
  j["area_side"] = net.drop.area_side;
  auto points = [](const std::vector<Point>& pts) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : pts) a.push_back({p.x, p.y});
    return a;
  };
  j["ap_positions"] = points(net.drop.aps);
  j["ue_positions"] = points(net.drop.ues);
  nlohmann::json pairs = nlohmann::json::array();
  for (int ap = 0; ap < net.m; ++ap) {
    for (int ue = 0; ue < net.k; ++ue) {
      const auto& pc = net.pair(ap, ue);
      nlohmann::json omega = nlohmann::json::array();
      for (Eigen::Index r = 0; r < pc.omega.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < pc.omega.cols(); ++c) row.push_back(pc.omega(r, c));
        omega.push_back(std::move(row));
      }
      pairs.push_back({{"ap", ap},
                       {"ue", ue},
                       {"beta", pc.beta},
                       {"u_r", complex_matrix_json(pc.u_r)},
                       {"u_t", complex_matrix_json(pc.u_t)},
                       {"omega", std::move(omega)},
                       {"r_full", complex_matrix_json(pc.r_full)}});
    }
  }
  j["pairs"] = std::move(pairs);
  return j;
}

Network network_from_json(const nlohmann::json& j) {
  Network net;
  net.m = j.at("m").get<int>();
  net.k = j.at("k").get<int>();
  net.l = j.at("l").get<int>();
  net.n = j.at("n").get<int>();
  net.drop.area_side = j.at("area_side").get<double>();
  for (const auto& p : j.at("ap_positions")) net.drop.aps.push_back({p.at(0), p.at(1)});
  for (const auto& p : j.at("ue_positions")) net.drop.ues.push_back({p.at(0), p.at(1)});
  net.pairs.resize(static_cast<std::size_t>(net.m * net.k));
  for (const auto& e : j.at("pairs")) {
    const int ap = e.at("ap").get<int>();
    const int ue = e.at("ue").get<int>();
    const auto& jo = e.at("omega");
    RMat omega(static_cast<Eigen::Index>(jo.size()),
               static_cast<Eigen::Index>(jo.at(0).size()));
    for (Eigen::Index r = 0; r < omega.rows(); ++r) {
      for (Eigen::Index c = 0; c < omega.cols(); ++c) omega(r, c) = jo.at(r).at(c).get<double>();
    }
    net.pairs.at(static_cast<std::size_t>(ap * net.k + ue)) =
        make_pair(complex_matrix_from_json(e.at("u_r")),
                  complex_matrix_from_json(e.at("u_t")), std::move(omega));
  }
  return net;
}

}  // namespace cfmimo
