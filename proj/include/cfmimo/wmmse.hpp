// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// Iterative WMMSE design of the uplink data precoders. Each outer iteration
// refreshes the channel statistics under the current precoders, then updates
// the LSFD weights A, the MSE matrices E and weights W = E^{-1}, and finally
// every precoder under its power budget.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "cfmimo/closedform.hpp"
#include "cfmimo/receive.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

struct WeightedProblem {
  std::vector<double> mu;  // priority weight per UE
  std::vector<double> p;   // power budget per UE [W]

  static WeightedProblem from_config(const SystemConfig& cfg);
  void validate(int k_total) const;
};

/// W = E^{-1}.
CMat update_weight(const CMat& e);

/// mu_k (cross_gram + lambda I)^{-1} E{G_kk}^H A_k W_k. With lambda = 0 a
/// singular cross_gram throws NumericsError instead of being regularized.
CMat precoder_update(const CMat& cross_gram, const CMat& g_mean_k,
                     const CMat& a_k, const CMat& w_k, double mu_k,
                     double lambda);

struct LambdaSearch {
  double lambda = 0.0;
  CMat f;
};

/// Smallest lambda >= 0 with trace(F(lambda) F(lambda)^H) <= budget. The
/// upper bracket starts at `scale` and doubles at most 60 times.
LambdaSearch bisect_lambda(double budget,
                           const std::function<CMat(double)>& f_of_lambda,
                           double scale);

/// Source of the statistics the optimizer consumes.
class StatisticsProvider {
 public:
  virtual ~StatisticsProvider() = default;
  /// Decode statistics under precoders f_u; `iteration` selects the
  /// realization stream when samples are not shared across iterations.
  virtual DecodeStatistics statistics(const std::vector<CMat>& f_u,
                                      int iteration) = 0;
  /// E{G_lk^H A_bar_l G_lk} at l * K + k, consistent with statistics().
  virtual std::vector<CMat> weighted_grams(const std::vector<CMat>& f_u,
                                           const std::vector<CMat>& a_bar,
                                           int iteration) = 0;
  /// True when repeated calls return exact expectations.
  virtual bool deterministic() const = 0;
};

class ClosedFormProvider final : public StatisticsProvider {
 public:
  explicit ClosedFormProvider(const ClosedFormContext& ctx) : ctx_(ctx) {}
  DecodeStatistics statistics(const std::vector<CMat>& f_u, int) override;
  std::vector<CMat> weighted_grams(const std::vector<CMat>& f_u,
                                   const std::vector<CMat>& a_bar, int) override;
  bool deterministic() const override { return true; }

 private:
  const ClosedFormContext& ctx_;
};

class MonteCarloProvider final : public StatisticsProvider {
 public:
  MonteCarloProvider(const SystemModel& model, CombinerKind combiner, int n_r,
                     std::uint64_t seed, bool common_random_numbers,
                     int workers);
  DecodeStatistics statistics(const std::vector<CMat>& f_u,
                              int iteration) override;
  std::vector<CMat> weighted_grams(const std::vector<CMat>& f_u,
                                   const std::vector<CMat>& a_bar,
                                   int iteration) override;
  bool deterministic() const override { return false; }

 private:
  std::uint64_t stream(int iteration) const;

  const SystemModel& model_;
  CombinerKind combiner_;
  int n_r_;
  std::uint64_t seed_;
  bool crn_;
  int workers_;
};

struct IterationRecord {
  int iteration = 0;
  double wsr = 0.0;
  std::vector<double> se;      // per UE [bit/s/Hz]
  std::vector<double> lambda;  // multiplier that produced F (0 at start)
  std::vector<double> power;   // trace(F F^H)
};

struct OptimizerState {
  std::vector<CMat> f_u;
  std::vector<CMat> a;
  std::vector<CMat> w;
  std::vector<CMat> e;
  std::vector<double> wsr_trace;
  int iteration = 0;
  std::vector<IterationRecord> records;
  /// UEs whose statistics vanish; kept at the initial precoder.
  std::vector<int> degenerate;
  /// Set when a deterministic provider produced a WSR decrease beyond
  /// 1e-8 relative slack.
  bool non_monotone = false;
};

/// Runs up to i_max outer iterations from F = sqrt(p_k / N) I, stopping once
/// |R(i) - R(i-1)| / R(i-1) <= epsilon. i_max = 0 only evaluates the start.
OptimizerState iwmmse_run(const SystemModel& model,
                          const WeightedProblem& problem,
                          StatisticsProvider& provider, int i_max,
                          double epsilon, int workers = 1);

}  // namespace cfmimo
