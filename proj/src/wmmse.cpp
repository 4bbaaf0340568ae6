// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/wmmse.hpp"

#include <cmath>
#include <string>

#include "cfmimo/numerics.hpp"
#include "cfmimo/parallel.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

WeightedProblem WeightedProblem::from_config(const SystemConfig& cfg) {
  WeightedProblem w;
  for (int ue = 0; ue < cfg.k; ++ue) {
    w.mu.push_back(cfg.weight(ue));
    w.p.push_back(cfg.power(ue));
  }
  return w;
}

void WeightedProblem::validate(int k_total) const {
  if (static_cast<int>(mu.size()) != k_total || static_cast<int>(p.size()) != k_total) {
    throw ConfigError("weighted problem needs one weight and one budget per UE");
  }
  for (int ue = 0; ue < k_total; ++ue) {
    const auto i = static_cast<std::size_t>(ue);
    if (!(mu[i] > 0.0) || !(p[i] > 0.0)) {
      throw ConfigError("UE " + std::to_string(ue) +
                        ": priority weight and power budget must be positive");
    }
  }
}

CMat update_weight(const CMat& e) { return inverse_hpd(e); }

CMat precoder_update(const CMat& cross_gram, const CMat& g_mean_k,
                     const CMat& a_k, const CMat& w_k, double mu_k,
                     double lambda) {
  if (lambda < 0.0) throw NumericsError("precoder_update: negative multiplier");
  const CMat rhs = mu_k * (g_mean_k.adjoint() * a_k * w_k);
  CMat sys = hermitian_part(cross_gram);
  if (lambda == 0.0) {
    Eigen::LLT<CMat> llt(sys);
    if (llt.info() != Eigen::Success) {
      throw NumericsError("precoder_update: singular system at lambda = 0");
    }
    return llt.solve(rhs);
  }
  sys.diagonal().array() += lambda;
  return solve_hpd(sys, rhs);
}

LambdaSearch bisect_lambda(double budget,
                           const std::function<CMat(double)>& f_of_lambda,
                           double scale) {
  auto power = [](const CMat& f) { return f.squaredNorm(); };
  try {
    CMat f0 = f_of_lambda(0.0);
    if (power(f0) <= budget) return {0.0, std::move(f0)};
  } catch (const NumericsError&) {
    // Unconstrained optimum does not exist; the multiplier must be positive.
  }
  double lo = 0.0;
  double hi = (scale > 0.0 && std::isfinite(scale)) ? scale : 1.0;
  CMat f_hi = f_of_lambda(hi);
  for (int doubling = 0; power(f_hi) > budget; ++doubling) {
    if (doubling == 60) {
      throw NumericsError("bisect_lambda: power budget not reached after 60 doublings");
    }
    lo = hi;
    hi *= 2.0;
    f_hi = f_of_lambda(hi);
  }
  for (int it = 0; it < 200; ++it) {
    if (power(f_hi) >= budget * (1.0 - 1e-10) || hi - lo <= 1e-15 * hi) break;
    const double mid = 0.5 * (lo + hi);
    CMat f_mid = f_of_lambda(mid);
    if (power(f_mid) > budget) {
      lo = mid;
    } else {
      hi = mid;
      f_hi = std::move(f_mid);
    }
  }
  return {hi, std::move(f_hi)};
}

DecodeStatistics ClosedFormProvider::statistics(const std::vector<CMat>& f_u, int) {
  return closed_form_statistics(ctx_, f_u);
}

std::vector<CMat> ClosedFormProvider::weighted_grams(const std::vector<CMat>&,
                                                     const std::vector<CMat>& a_bar,
                                                     int) {
  const int kk = ctx_.model().k();
  std::vector<CMat> out;
  out.reserve(static_cast<std::size_t>(kk * kk));
  for (int l = 0; l < kk; ++l) {
    for (int k = 0; k < kk; ++k) {
      out.push_back(ctx_.weighted_gram(a_bar[static_cast<std::size_t>(l)], l, k));
    }
  }
  return out;
}

MonteCarloProvider::MonteCarloProvider(const SystemModel& model,
                                       CombinerKind combiner, int n_r,
                                       std::uint64_t seed,
                                       bool common_random_numbers, int workers)
    : model_(model),
      combiner_(combiner),
      n_r_(n_r),
      seed_(seed),
      crn_(common_random_numbers),
      workers_(workers) {}

std::uint64_t MonteCarloProvider::stream(int iteration) const {
  if (crn_) return seed_;
  return make_rng(seed_, Stream::realization, 1,
                  static_cast<std::uint64_t>(iteration))();
}

DecodeStatistics MonteCarloProvider::statistics(const std::vector<CMat>& f_u,
                                                int iteration) {
  return mc_decode_stats(model_, f_u, combiner_, n_r_, stream(iteration), workers_);
}

std::vector<CMat> MonteCarloProvider::weighted_grams(
    const std::vector<CMat>& f_u, const std::vector<CMat>& a_bar, int iteration) {
  return mc_weighted_grams(model_, f_u, combiner_, a_bar, n_r_,
                           stream(iteration), workers_);
}

namespace {

bool is_degenerate(const DecodeStatistics& stats, int ue) {
  return stats.g_mean[static_cast<std::size_t>(ue)].norm() == 0.0;
}

IterationRecord evaluate(const SystemModel& model, const WeightedProblem& problem,
                         const DecodeStatistics& stats,
                         const std::vector<CMat>& f_u, int iteration) {
  IterationRecord rec;
  rec.iteration = iteration;
  for (int ue = 0; ue < model.k(); ++ue) {
    const auto i = static_cast<std::size_t>(ue);
    const double se = is_degenerate(stats, ue)
                          ? 0.0
                          : optimal_se(stats, f_u[i], model.cfg.sigma2,
                                       model.tau_p(), model.cfg.tau_c, ue);
    rec.se.push_back(se);
    rec.wsr += problem.mu[i] * se;
    rec.power.push_back(f_u[i].squaredNorm());
  }
  rec.lambda.assign(static_cast<std::size_t>(model.k()), 0.0);
  return rec;
}

}  // namespace

OptimizerState iwmmse_run(const SystemModel& model,
                          const WeightedProblem& problem,
                          StatisticsProvider& provider, int i_max,
                          double epsilon, int workers) {
  const int kk = model.k(), n = model.n();
  problem.validate(kk);
  if (i_max < 0) throw ConfigError("i_max must be >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  const double sigma2 = model.cfg.sigma2;

  OptimizerState state;
  std::vector<CMat> initial;
  for (int ue = 0; ue < kk; ++ue) {
    initial.push_back(std::sqrt(problem.p[static_cast<std::size_t>(ue)] / n) *
                      CMat::Identity(n, n));
  }
  state.f_u = initial;

  DecodeStatistics stats = provider.statistics(state.f_u, 0);
  for (int ue = 0; ue < kk; ++ue) {
    if (is_degenerate(stats, ue)) state.degenerate.push_back(ue);
  }
  state.records.push_back(evaluate(model, problem, stats, state.f_u, 0));
  state.wsr_trace.push_back(state.records.back().wsr);

  auto refresh_weights = [&](const DecodeStatistics& s) {
    state.a.assign(static_cast<std::size_t>(kk), CMat());
    state.e.assign(static_cast<std::size_t>(kk), CMat());
    state.w.assign(static_cast<std::size_t>(kk), CMat());
    for (int ue = 0; ue < kk; ++ue) {
      const auto i = static_cast<std::size_t>(ue);
      if (is_degenerate(s, ue)) {
        state.a[i] = CMat::Zero(model.m() * n, n);
        state.e[i] = CMat::Identity(n, n);
        state.w[i] = CMat::Identity(n, n);
        continue;
      }
      state.a[i] = optimal_lsfd(s, state.f_u[i], sigma2, ue);
      state.e[i] = mse_matrix(s, state.a[i], state.f_u[i], sigma2, ue);
      state.w[i] = update_weight(state.e[i]);
    }
  };

  for (int it = 1; it <= i_max; ++it) {
    refresh_weights(stats);
    std::vector<CMat> a_bar;
    for (int ue = 0; ue < kk; ++ue) {
      const auto i = static_cast<std::size_t>(ue);
      a_bar.push_back(hermitian_part(state.a[i] * state.w[i] * state.a[i].adjoint()));
    }
    const std::vector<CMat> grams = provider.weighted_grams(state.f_u, a_bar, it - 1);

    std::vector<CMat> next(static_cast<std::size_t>(kk));
    std::vector<double> lambdas(static_cast<std::size_t>(kk), 0.0);
    parallel_for(kk, workers, [&](int ue) {
      const auto i = static_cast<std::size_t>(ue);
      if (is_degenerate(stats, ue)) {
        next[i] = initial[i];
        return;
      }
      CMat cross = CMat::Zero(n, n);
      for (int l = 0; l < kk; ++l) {
        cross += problem.mu[static_cast<std::size_t>(l)] *
                 grams[static_cast<std::size_t>(l * kk + ue)];
      }
      cross = hermitian_part(cross);
      const CMat& g_mean = stats.g_mean[i];
      auto f_of = [&](double lambda) {
        return precoder_update(cross, g_mean, state.a[i], state.w[i],
                               problem.mu[i], lambda);
      };
      LambdaSearch found =
          bisect_lambda(problem.p[i], f_of, std::abs(cross.trace().real()) / n);
      next[i] = std::move(found.f);
      lambdas[i] = found.lambda;
    });
    state.f_u = std::move(next);
    state.iteration = it;

    stats = provider.statistics(state.f_u, it);
    IterationRecord rec = evaluate(model, problem, stats, state.f_u, it);
    rec.lambda = lambdas;
    const double prev = state.wsr_trace.back();
    state.records.push_back(rec);
    state.wsr_trace.push_back(rec.wsr);
    if (provider.deterministic() && rec.wsr < prev - 1e-8 * std::abs(prev)) {
      state.non_monotone = true;
    }
    if (prev == 0.0 ? rec.wsr == 0.0 : std::abs(rec.wsr - prev) / prev <= epsilon) break;
  }
  refresh_weights(stats);
  return state;
}

}  // namespace cfmimo
