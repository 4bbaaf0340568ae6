// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/harness.hpp"

#include <charconv>
#include <chrono>
#include <memory>
#include <ostream>

#include <nlohmann/json.hpp>

#include "cfmimo/channel.hpp"
#include "cfmimo/closedform.hpp"
#include "cfmimo/parallel.hpp"

namespace cfmimo {

int iteration_budget(const SystemConfig& cfg) {
  switch (cfg.precoder_mode) {
    case PrecoderMode::none: return 0;
    case PrecoderMode::wmmse1: return 1;
    case PrecoderMode::iwmmse: return cfg.i_max;
  }
  return 0;
}

namespace {

DropResult run_drop_impl(const SystemConfig& cfg, std::uint64_t drop_seed,
                         int workers) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const SystemModel model = build_model(cfg, drop_seed);
  const WeightedProblem problem = WeightedProblem::from_config(cfg);

  std::unique_ptr<ClosedFormContext> ctx;
  std::unique_ptr<StatisticsProvider> provider;
  if (cfg.se_path == SePath::closed) {
    ctx = std::make_unique<ClosedFormContext>(model);
    provider = std::make_unique<ClosedFormProvider>(*ctx);
  } else {
    provider = std::make_unique<MonteCarloProvider>(
        model, cfg.combiner, cfg.n_r, drop_seed, cfg.common_random_numbers, workers);
  }
  const OptimizerState state = iwmmse_run(model, problem, *provider,
                                          iteration_budget(cfg), cfg.epsilon, workers);

  DropResult out;
  const int n_r = cfg.se_path == SePath::mc ? cfg.n_r : 0;
  auto base = [&](int iteration, int ue) {
    SeRow row;
    row.drop_seed = drop_seed;
    row.m = cfg.m;
    row.k_total = cfg.k;
    row.l = cfg.l;
    row.n = cfg.n;
    row.combiner = cfg.combiner;
    row.precoder_mode = cfg.precoder_mode;
    row.se_path = cfg.se_path;
    row.iteration = iteration;
    row.ue_id = ue;
    row.n_r = n_r;
    return row;
  };
  for (const IterationRecord& rec : state.records) {
    double sum = 0.0;
    for (double se : rec.se) sum += se;
    for (int ue = 0; ue < cfg.k; ++ue) {
      const auto i = static_cast<std::size_t>(ue);
      SeRow row = base(rec.iteration, ue);
      row.se = rec.se[i];
      row.sum_se = sum;
      row.wsr = rec.wsr;
      out.rows.push_back(row);
      out.trace.push_back({drop_seed, cfg.l, cfg.n, rec.iteration, ue, rec.se[i],
                           rec.lambda[i], rec.power[i], rec.wsr});
    }
    out.final_sum_se = sum;
    out.final_wsr = rec.wsr;
  }
  SeRow summary = base(state.records.back().iteration, -1);
  summary.se = out.final_sum_se / cfg.k;
  summary.sum_se = out.final_sum_se;
  summary.wsr = out.final_wsr;
  out.rows.push_back(summary);
  out.iterations = state.iteration;

  for (int ue : state.degenerate) {
    out.warnings.push_back("drop " + std::to_string(drop_seed) + ": UE " +
                           std::to_string(ue) +
                           " has vanishing statistics; kept at the initial precoder");
  }
  if (state.non_monotone) {
    out.warnings.push_back("drop " + std::to_string(drop_seed) +
                           ": weighted sum rate decreased on the closed-form path");
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

DropResult run_drop(const SystemConfig& cfg, std::uint64_t drop_seed, int workers) {
  try {
    return run_drop_impl(cfg, drop_seed, workers);
  } catch (const ConfigError& e) {
    throw ConfigError("drop " + std::to_string(drop_seed) + ": " + e.what());
  } catch (const NumericsError& e) {
    throw NumericsError("drop " + std::to_string(drop_seed) + ": " + e.what());
  }
}

std::string_view to_string(SweepAxis a) { return a == SweepAxis::l ? "l" : "n"; }

SweepAxis parse_axis(std::string_view s) {
  if (s == "l" || s == "L") return SweepAxis::l;
  if (s == "n" || s == "N") return SweepAxis::n;
  throw ConfigError("unknown sweep axis '" + std::string(s) + "' (expected l or n)");
}

SweepResult sweep(const SystemConfig& cfg, SweepAxis axis,
                  const std::vector<int>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (cfg.seeds.empty()) throw ConfigError("sweep needs at least one drop seed");
  SweepResult result;
  std::vector<SystemConfig> configs;
  std::vector<int> kept;
  for (int v : values) {
    SystemConfig c = cfg;
    if (axis == SweepAxis::l) {
      c.l = v;
    } else {
      c.n = v;
      c.tau_p = 0;
    }
    try {
      c.validate();
    } catch (const ConfigError& e) {
      result.warnings.push_back("skipping " + std::string(to_string(axis)) + " = " +
                                std::to_string(v) + ": " + e.what());
      continue;
    }
    configs.push_back(c);
    kept.push_back(v);
  }

  const int drops = static_cast<int>(cfg.seeds.size());
  const int jobs = static_cast<int>(configs.size()) * drops;
  result.points.resize(static_cast<std::size_t>(jobs));
  parallel_for(jobs, cfg.worker_count(), [&](int job) {
    const auto vi = static_cast<std::size_t>(job / drops);
    const std::uint64_t seed = cfg.seeds[static_cast<std::size_t>(job % drops)];
    GridPoint& gp = result.points[static_cast<std::size_t>(job)];
    gp.value = kept[vi];
    gp.drop_seed = seed;
    gp.result = run_drop(configs[vi], seed, 1);
  });
  for (const GridPoint& gp : result.points) {
    for (const std::string& w : gp.result.warnings) result.warnings.push_back(w);
  }
  return result;
}

SweepResult run_drops(const SystemConfig& cfg) {
  return sweep(cfg, SweepAxis::l, {cfg.l});
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_results_csv(std::ostream& out, const SweepResult& r) {
  out << "drop_seed,m,k_total,l,n,combiner,precoder_mode,se_path,iteration,"
         "ue_id,se_bits_per_hz,sum_se,wsr,n_r\n";
  for (const GridPoint& gp : r.points) {
    for (const SeRow& row : gp.result.rows) {
      out << row.drop_seed << ',' << row.m << ',' << row.k_total << ',' << row.l
          << ',' << row.n << ',' << to_string(row.combiner) << ','
          << to_string(row.precoder_mode) << ',' << to_string(row.se_path) << ','
          << row.iteration << ',' << row.ue_id << ',' << format_double(row.se)
          << ',' << format_double(row.sum_se) << ',' << format_double(row.wsr)
          << ',' << row.n_r << '\n';
    }
  }
}

void write_trace_csv(std::ostream& out, const SweepResult& r) {
  out << "drop_seed,l,n,iteration,ue_id,se_bits_per_hz,lambda,power,wsr\n";
  for (const GridPoint& gp : r.points) {
    for (const TraceRow& t : gp.result.trace) {
      out << t.drop_seed << ',' << t.l << ',' << t.n << ',' << t.iteration << ','
          << t.ue_id << ',' << format_double(t.se) << ',' << format_double(t.lambda)
          << ',' << format_double(t.power) << ',' << format_double(t.wsr) << '\n';
    }
  }
}

void write_timing_csv(std::ostream& out, const SweepResult& r) {
  out << "value,drop_seed,iterations,seconds\n";
  for (const GridPoint& gp : r.points) {
    out << gp.value << ',' << gp.drop_seed << ',' << gp.result.iterations << ','
        << format_double(gp.result.seconds) << '\n';
  }
}

void write_meta_json(std::ostream& out, const SystemConfig& cfg,
                     const std::string& command, const std::string& axis,
                     const std::vector<int>& values) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = format_config(cfg);
  j["seeds"] = cfg.seeds;
  j["pilot_length"] = cfg.pilot_length();
  if (!axis.empty()) {
    j["axis"] = axis;
    j["values"] = values;
  }
  out << j.dump(2) << '\n';
}

}  // namespace cfmimo
