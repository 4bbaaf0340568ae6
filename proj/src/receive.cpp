// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/receive.hpp"

#include <algorithm>
#include <functional>

#include "cfmimo/numerics.hpp"
#include "cfmimo/parallel.hpp"

namespace cfmimo {

CMat mr_combiner(const CMat& h_hat) { return h_hat; }

CMat cprime(const CMat& c, const CMat& f_bar, int l) {
  const int n = static_cast<int>(f_bar.rows());
  if (c.rows() != l * n || c.cols() != l * n) {
    throw NumericsError("cprime: C must be LN x LN");
  }
  CMat out = CMat::Zero(l, l);
  for (int p2 = 0; p2 < n; ++p2) {
    for (int p1 = 0; p1 < n; ++p1) {
      out += f_bar(p2, p1) * c.block(p2 * l, p1 * l, l, l);
    }
  }
  return out;
}

CMat lmmse_combiner(const std::vector<CMat>& h_hat_at_ap,
                    const std::vector<CMat>& cprime_at_ap,
                    const std::vector<CMat>& f_u, double sigma2, int k) {
  const auto l = h_hat_at_ap.at(0).rows();
  CMat b = sigma2 * CMat::Identity(l, l);
  for (std::size_t j = 0; j < h_hat_at_ap.size(); ++j) {
    const CMat hf = h_hat_at_ap[j] * f_u[j];
    b += hf * hf.adjoint() + cprime_at_ap[j];
  }
  const auto ks = static_cast<std::size_t>(k);
  return solve_hpd(b, h_hat_at_ap[ks] * f_u[ks]);
}

CMat DecodeStatistics::gram_sum(int ue) const {
  CMat acc = gram(ue, 0);
  for (int other = 1; other < k; ++other) acc += gram(ue, other);
  return acc;
}

namespace {

constexpr int kChunk = 32;

// Everything needed to turn one channel realization into combiners and
// effective channels G_kl.
class CombiningStage {
 public:
  CombiningStage(const SystemModel& model, const std::vector<CMat>& f_u,
                 CombinerKind kind)
      : model_(model), f_u_(f_u), kind_(kind) {
    if (static_cast<int>(f_u.size()) != model.k()) {
      throw ConfigError("need one data precoder per UE");
    }
    if (kind == CombinerKind::lmmse) {
      const int l = model.l();
      for (int ap = 0; ap < model.m(); ++ap) {
        CMat acc = model.cfg.sigma2 * CMat::Identity(l, l);
        for (int ue = 0; ue < model.k(); ++ue) {
          const CMat& f = f_u[static_cast<std::size_t>(ue)];
          acc += cprime(model.est.c[model.est.index(ap, ue)], f * f.adjoint(), l);
        }
        noise_plus_error_.push_back(hermitian_part(acc));
      }
    }
  }

  // v[m * K + k] = V_mk.
  void combiners(const ChannelRealization& r, std::vector<CMat>& v) const {
    const int kk = model_.k();
    v.resize(r.h_hat.size());
    if (kind_ == CombinerKind::mr) {
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = mr_combiner(r.h_hat[i]);
      return;
    }
    const int n = model_.n();
    for (int ap = 0; ap < model_.m(); ++ap) {
      CMat b = noise_plus_error_[static_cast<std::size_t>(ap)];
      CMat rhs(model_.l(), kk * n);
      for (int ue = 0; ue < kk; ++ue) {
        const CMat hf = r.h_hat[static_cast<std::size_t>(ap * kk + ue)] *
                        f_u_[static_cast<std::size_t>(ue)];
        b += hf * hf.adjoint();
        rhs.middleCols(ue * n, n) = hf;
      }
      const CMat sol = solve_hpd(b, rhs);
      for (int ue = 0; ue < kk; ++ue) {
        v[static_cast<std::size_t>(ap * kk + ue)] = sol.middleCols(ue * n, n);
      }
    }
  }

  // g[k * K + l] = G_kl.
  void effective_channels(const ChannelRealization& r,
                          const std::vector<CMat>& v,
                          std::vector<CMat>& g) const {
    const int m = model_.m(), kk = model_.k(), n = model_.n();
    g.resize(static_cast<std::size_t>(kk * kk));
    for (int ue = 0; ue < kk; ++ue) {
      for (int other = 0; other < kk; ++other) {
        CMat& gk = g[static_cast<std::size_t>(ue * kk + other)];
        gk.resize(m * n, n);
        for (int ap = 0; ap < m; ++ap) {
          gk.middleRows(ap * n, n).noalias() =
              v[static_cast<std::size_t>(ap * kk + ue)].adjoint() *
              r.h[static_cast<std::size_t>(ap * kk + other)];
        }
      }
    }
  }

  const SystemModel& model() const { return model_; }
  const std::vector<CMat>& f_u() const { return f_u_; }

 private:
  const SystemModel& model_;
  const std::vector<CMat>& f_u_;
  CombinerKind kind_;
  std::vector<CMat> noise_plus_error_;
};

// Runs `body` over realizations [0, n_r) in fixed chunks; each chunk
// produces an accumulator which is folded into `total` in chunk order.
template <typename Acc>
void chunked_reduce(int n_r, int workers, Acc& total,
                    const std::function<Acc()>& make,
                    const std::function<void(Acc&, int)>& body,
                    const std::function<void(Acc&, const Acc&)>& fold) {
  const int chunks = (n_r + kChunk - 1) / kChunk;
  workers = std::max(1, workers);
  for (int wave = 0; wave < chunks; wave += workers) {
    const int count = std::min(workers, chunks - wave);
    std::vector<Acc> partial(static_cast<std::size_t>(count));
    parallel_for(count, workers, [&](int c) {
      Acc acc = make();
      const int first = (wave + c) * kChunk;
      const int last = std::min(n_r, first + kChunk);
      for (int r = first; r < last; ++r) body(acc, r);
      partial[static_cast<std::size_t>(c)] = std::move(acc);
    });
    for (const auto& p : partial) fold(total, p);
  }
}

struct StatsAcc {
  std::vector<CMat> g_mean, g_gram, s;
};

}  // namespace

std::vector<CMat> compute_combiners(const SystemModel& model,
                                    const std::vector<CMat>& f_u,
                                    CombinerKind combiner,
                                    const ChannelRealization& realization) {
  std::vector<CMat> v;
  CombiningStage(model, f_u, combiner).combiners(realization, v);
  return v;
}

DecodeStatistics mc_decode_stats(const SystemModel& model,
                                 const std::vector<CMat>& f_u,
                                 CombinerKind combiner, int n_r,
                                 std::uint64_t seed, int workers) {
  if (n_r < 1) throw ConfigError("mc_decode_stats: n_r must be >= 1");
  const CombiningStage stage(model, f_u, combiner);
  const int m = model.m(), kk = model.k(), n = model.n();
  const auto mn = static_cast<Eigen::Index>(m * n);

  auto make = [&] {
    StatsAcc acc;
    acc.g_mean.assign(static_cast<std::size_t>(kk), CMat::Zero(mn, n));
    acc.g_gram.assign(static_cast<std::size_t>(kk * kk), CMat::Zero(mn, mn));
    acc.s.assign(static_cast<std::size_t>(kk), CMat::Zero(mn, mn));
    return acc;
  };
  auto body = [&](StatsAcc& acc, int r) {
    ChannelRealization real;
    std::vector<CMat> v, g;
    draw_realization(model, seed, static_cast<std::uint64_t>(r), real);
    stage.combiners(real, v);
    stage.effective_channels(real, v, g);
    for (int ue = 0; ue < kk; ++ue) {
      acc.g_mean[static_cast<std::size_t>(ue)] += g[static_cast<std::size_t>(ue * kk + ue)];
      for (int other = 0; other < kk; ++other) {
        const auto idx = static_cast<std::size_t>(ue * kk + other);
        const CMat x = g[idx] * f_u[static_cast<std::size_t>(other)];
        acc.g_gram[idx].noalias() += x * x.adjoint();
      }
      for (int ap = 0; ap < m; ++ap) {
        const CMat& vm = v[static_cast<std::size_t>(ap * kk + ue)];
        acc.s[static_cast<std::size_t>(ue)].block(ap * n, ap * n, n, n).noalias() +=
            vm.adjoint() * vm;
      }
    }
  };
  auto fold = [](StatsAcc& total, const StatsAcc& part) {
    for (std::size_t i = 0; i < total.g_mean.size(); ++i) total.g_mean[i] += part.g_mean[i];
    for (std::size_t i = 0; i < total.g_gram.size(); ++i) total.g_gram[i] += part.g_gram[i];
    for (std::size_t i = 0; i < total.s.size(); ++i) total.s[i] += part.s[i];
  };

  StatsAcc total = make();
  chunked_reduce<StatsAcc>(n_r, workers, total, make, body, fold);

  DecodeStatistics stats;
  stats.m = m;
  stats.k = kk;
  stats.n = n;
  stats.source = StatsSource::monte_carlo;
  stats.n_r = n_r;
  const double inv = 1.0 / n_r;
  for (auto& x : total.g_mean) stats.g_mean.push_back(inv * x);
  for (auto& x : total.g_gram) stats.g_gram.push_back(hermitian_part(inv * x));
  for (auto& x : total.s) stats.s.push_back(hermitian_part(inv * x));
  return stats;
}

std::vector<CMat> mc_weighted_grams(const SystemModel& model,
                                    const std::vector<CMat>& f_u,
                                    CombinerKind combiner,
                                    const std::vector<CMat>& a_bar, int n_r,
                                    std::uint64_t seed, int workers) {
  if (n_r < 1) throw ConfigError("mc_weighted_grams: n_r must be >= 1");
  const CombiningStage stage(model, f_u, combiner);
  const int kk = model.k(), n = model.n();
  using Acc = std::vector<CMat>;
  auto make = [&] { return Acc(static_cast<std::size_t>(kk * kk), CMat::Zero(n, n)); };
  auto body = [&](Acc& acc, int r) {
    ChannelRealization real;
    std::vector<CMat> v, g;
    draw_realization(model, seed, static_cast<std::uint64_t>(r), real);
    stage.combiners(real, v);
    stage.effective_channels(real, v, g);
    for (int ue = 0; ue < kk; ++ue) {
      const CMat& ab = a_bar[static_cast<std::size_t>(ue)];
      for (int other = 0; other < kk; ++other) {
        const CMat& gl = g[static_cast<std::size_t>(ue * kk + other)];
        acc[static_cast<std::size_t>(ue * kk + other)].noalias() += gl.adjoint() * (ab * gl);
      }
    }
  };
  auto fold = [](Acc& total, const Acc& part) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += part[i];
  };
  Acc total = make();
  chunked_reduce<Acc>(n_r, workers, total, make, body, fold);
  for (auto& x : total) x = hermitian_part(x / static_cast<double>(n_r));
  return total;
}

double prelog(int tau_p, int tau_c) {
  return tau_p >= tau_c ? 0.0 : 1.0 - static_cast<double>(tau_p) / tau_c;
}

CMat optimal_lsfd(const DecodeStatistics& stats, const CMat& f_u,
                  double sigma2, int k) {
  const auto ks = static_cast<std::size_t>(k);
  const CMat total = stats.gram_sum(k) + sigma2 * stats.s[ks];
  return solve_hpd(total, stats.g_mean[ks] * f_u);
}

CMat mse_matrix(const DecodeStatistics& stats, const CMat& a, const CMat& f_u,
                double sigma2, int k) {
  const auto ks = static_cast<std::size_t>(k);
  const CMat d = a.adjoint() * stats.g_mean[ks] * f_u;
  const CMat total = stats.gram_sum(k) + sigma2 * stats.s[ks];
  const auto n = f_u.cols();
  return hermitian_part(CMat::Identity(n, n) - d - d.adjoint() +
                        a.adjoint() * total * a);
}

CMat optimal_mse_matrix(const DecodeStatistics& stats, const CMat& a_opt,
                        const CMat& f_u, int k) {
  const auto ks = static_cast<std::size_t>(k);
  const auto n = f_u.cols();
  return hermitian_part(CMat::Identity(n, n) -
                        f_u.adjoint() * stats.g_mean[ks].adjoint() * a_opt);
}

double uatf_se(const DecodeStatistics& stats, const CMat& a, const CMat& f_u,
               double sigma2, int tau_p, int tau_c, int k) {
  const double pre = prelog(tau_p, tau_c);
  const auto ks = static_cast<std::size_t>(k);
  const CMat d = a.adjoint() * stats.g_mean[ks] * f_u;
  if (pre == 0.0 || d.norm() == 0.0) return 0.0;
  const CMat total = stats.gram_sum(k) + sigma2 * stats.s[ks];
  const CMat sigma = hermitian_part(a.adjoint() * total * a - d * d.adjoint());
  const auto n = f_u.cols();
  const CMat inner = CMat::Identity(n, n) + d.adjoint() * solve_hpd(sigma, d);
  return pre * std::max(0.0, log2_det_hpd(inner));
}

double optimal_se(const DecodeStatistics& stats, const CMat& f_u,
                  double sigma2, int tau_p, int tau_c, int k) {
  const double pre = prelog(tau_p, tau_c);
  const auto ks = static_cast<std::size_t>(k);
  const CMat gf = stats.g_mean[ks] * f_u;
  if (pre == 0.0 || gf.norm() == 0.0) return 0.0;
  const CMat cov = hermitian_part(stats.gram_sum(k) + sigma2 * stats.s[ks] -
                                  gf * gf.adjoint());
  const auto n = f_u.cols();
  const CMat inner = CMat::Identity(n, n) + gf.adjoint() * solve_hpd(cov, gf);
  return pre * std::max(0.0, log2_det_hpd(inner));
}

}  // namespace cfmimo
