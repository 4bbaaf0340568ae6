// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/channel.hpp"

#include <cmath>
#include <string>

#include "cfmimo/numerics.hpp"

namespace cfmimo {

PilotPlan assign_pilots(int k_total, int n, int tau_p) {
  if (k_total < 1 || n < 1) throw ConfigError("assign_pilots: need k, n >= 1");
  if (tau_p < n || tau_p % n != 0) {
    throw ConfigError("assign_pilots: tau_p = " + std::to_string(tau_p) +
                      " is not a positive multiple of n = " + std::to_string(n));
  }
  PilotPlan plan;
  plan.tau_p = tau_p;
  plan.n = n;
  const int groups = tau_p / n;
  plan.group.resize(static_cast<std::size_t>(k_total));
  for (int ue = 0; ue < k_total; ++ue) plan.group[static_cast<std::size_t>(ue)] = ue % groups;
  plan.copilots.resize(static_cast<std::size_t>(k_total));
  for (int a = 0; a < k_total; ++a) {
    for (int b = 0; b < k_total; ++b) {
      if (plan.shares_pilot(a, b)) plan.copilots[static_cast<std::size_t>(a)].push_back(b);
    }
  }
  return plan;
}

CMat pilot_transform(const CMat& f, int l) {
  return kron(f.transpose(), CMat::Identity(l, l));
}

std::vector<CMat> scaled_identity_precoders(const SystemConfig& cfg) {
  std::vector<CMat> out;
  out.reserve(static_cast<std::size_t>(cfg.k));
  for (int ue = 0; ue < cfg.k; ++ue) {
    out.push_back(std::sqrt(cfg.power(ue) / cfg.n) * CMat::Identity(cfg.n, cfg.n));
  }
  return out;
}

CMat sample_channel(const PairCorrelation& pc, Rng& rng) {
  const CMat iid = complex_normal_matrix(pc.omega.rows(), pc.omega.cols(), rng);
  const CMat weighted = pc.omega.cwiseSqrt().cast<cd>().cwiseProduct(iid);
  return pc.u_r * weighted * pc.u_t.adjoint();
}

CMat sample_channel(const PairCorrelation& pc, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::channel);
  return sample_channel(pc, rng);
}

EstimationStatistics pilot_statistics(const Network& net, const PilotPlan& plan,
                                      const std::vector<CMat>& f_p,
                                      double sigma2) {
  if (static_cast<int>(f_p.size()) != net.k) {
    throw ConfigError("pilot_statistics: need one pilot precoder per UE");
  }
  if (!(sigma2 > 0.0)) throw NumericsError("pilot_statistics: sigma2 must be positive");
  EstimationStatistics est;
  est.m = net.m;
  est.k = net.k;
  est.l = net.l;
  est.n = net.n;
  est.tau_p = plan.tau_p;
  const int dim = net.l * net.n;
  const double tau = plan.tau_p;
  std::vector<CMat> ftilde;
  for (const auto& f : f_p) ftilde.push_back(pilot_transform(f, net.l));

  const auto pairs = static_cast<std::size_t>(net.m * net.k);
  est.psi.resize(pairs);
  est.r_hat.resize(pairs);
  est.c.resize(pairs);
  est.estimator.resize(pairs);
  for (int ap = 0; ap < net.m; ++ap) {
    for (int ue = 0; ue < net.k; ++ue) {
      const auto idx = est.index(ap, ue);
      CMat psi = sigma2 * CMat::Identity(dim, dim);
      for (int j : plan.copilots[static_cast<std::size_t>(ue)]) {
        const CMat& fj = ftilde[static_cast<std::size_t>(j)];
        psi += tau * fj * net.pair(ap, j).r_full * fj.adjoint();
      }
      psi = hermitian_part(psi);
      const CMat& r = net.pair(ap, ue).r_full;
      const CMat& fk = ftilde[static_cast<std::size_t>(ue)];
      // estimator = R F~^H Psi^{-1} = (Psi^{-1} F~ R)^H
      CMat estimator = solve_hpd(psi, fk * r).adjoint();
      est.r_hat[idx] = hermitian_part(tau * estimator * fk * r);
      est.c[idx] = r - est.r_hat[idx];
      est.psi[idx] = std::move(psi);
      est.estimator[idx] = std::move(estimator);
    }
  }
  return est;
}

std::vector<CVec> pilot_observations(const std::vector<CMat>& h_all,
                                     const Network& net, const PilotPlan& plan,
                                     const std::vector<CMat>& f_p,
                                     double sigma2, Rng* noise) {
  const int groups = plan.pilot_count();
  const int dim = net.l * net.n;
  const double tau = plan.tau_p;
  const double noise_std = std::sqrt(tau * sigma2);
  std::vector<CVec> y(static_cast<std::size_t>(net.m * groups), CVec::Zero(dim));
  for (int ap = 0; ap < net.m; ++ap) {
    for (int ue = 0; ue < net.k; ++ue) {
      const auto g = static_cast<std::size_t>(ap * groups + plan.group[static_cast<std::size_t>(ue)]);
      const CMat hf = h_all[static_cast<std::size_t>(ap * net.k + ue)] * f_p[static_cast<std::size_t>(ue)];
      y[g] += tau * vec(hf);
    }
    if (noise != nullptr) {
      for (int g = 0; g < groups; ++g) {
        CVec& v = y[static_cast<std::size_t>(ap * groups + g)];
        for (int i = 0; i < dim; ++i) v(i) += noise_std * complex_normal(*noise);
      }
    }
  }
  return y;
}

namespace {

void estimate_into(const std::vector<CVec>& y, const Network& net, const EstimationStatistics& est,
                   const PilotPlan& plan, ChannelRealization& out) {
  const int groups = plan.pilot_count();
  const auto pairs = static_cast<std::size_t>(net.m * net.k);
  out.h_hat.resize(pairs);
  out.h_tilde.resize(pairs);
  for (int ap = 0; ap < net.m; ++ap) {
    for (int ue = 0; ue < net.k; ++ue) {
      const auto idx = est.index(ap, ue);
      const auto g = static_cast<std::size_t>(ap * groups + plan.group[static_cast<std::size_t>(ue)]);
      out.h_hat[idx] = unvec(est.estimator[idx] * y[g], net.l, net.n);
      out.h_tilde[idx] = out.h[idx] - out.h_hat[idx];
    }
  }
}

}  // namespace

ChannelRealization mmse_estimate(const std::vector<CMat>& h_all,
                                 const Network& net,
                                 const EstimationStatistics& est,
                                 const PilotPlan& plan,
                                 const std::vector<CMat>& f_p, double sigma2,
                                 Rng& noise) {
  ChannelRealization out;
  out.h = h_all;
  const auto y = pilot_observations(h_all, net, plan, f_p, sigma2, &noise);
  estimate_into(y, net, est, plan, out);
  return out;
}

SystemModel build_model(const SystemConfig& cfg, Network net,
                        std::vector<CMat> f_p) {
  SystemModel model;
  model.cfg = cfg;
  model.cfg.m = net.m;
  model.cfg.k = net.k;
  model.cfg.l = net.l;
  model.cfg.n = net.n;
  model.net = std::move(net);
  model.plan = assign_pilots(model.net.k, model.net.n, model.cfg.pilot_length());
  model.f_p = f_p.empty() ? scaled_identity_precoders(model.cfg) : std::move(f_p);
  model.est = pilot_statistics(model.net, model.plan, model.f_p, model.cfg.sigma2);
  return model;
}

SystemModel build_model(const SystemConfig& cfg, std::uint64_t drop_seed) {
  return build_model(cfg, generate_network(cfg, drop_seed));
}

void draw_realization(const SystemModel& model, std::uint64_t seed,
                      std::uint64_t index, ChannelRealization& out) {
  Rng rng = make_rng(seed, Stream::realization, index);
  const auto pairs = static_cast<std::size_t>(model.m() * model.k());
  out.h.resize(pairs);
  for (std::size_t i = 0; i < pairs; ++i) out.h[i] = sample_channel(model.net.pairs[i], rng);
  const auto y = pilot_observations(out.h, model.net, model.plan, model.f_p,
                                    model.cfg.sigma2, &rng);
  estimate_into(y, model.net, model.est, model.plan, out);
}

}  // namespace cfmimo
