// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// Batch driver: `run` evaluates drops at one configuration, `sweep` walks a
// grid over L or N. Both write results.csv, trace.csv, timing.csv and
// meta.json into the output directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfmimo/config.hpp"
#include "cfmimo/harness.hpp"
#include "cfmimo/types.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  std::optional<std::string> combiner;
  std::optional<std::string> precoder;
  std::optional<std::string> se_path;
  std::optional<int> mc_samples;
  std::optional<int> workers;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file");
  cmd->add_option("--seed", o.seed, "first drop seed");
  cmd->add_option("--drops", o.drops, "number of consecutive drop seeds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--combiner", o.combiner, "mr | lmmse")
      ->check(CLI::IsMember({"mr", "lmmse"}));
  cmd->add_option("--precoder", o.precoder, "none | wmmse1 | iwmmse")
      ->check(CLI::IsMember({"none", "wmmse1", "iwmmse"}));
  cmd->add_option("--se-path", o.se_path, "mc | closed")
      ->check(CLI::IsMember({"mc", "closed"}));
  cmd->add_option("--mc-samples", o.mc_samples, "Monte-Carlo realizations per statistic")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", o.out, "output directory");
}

cfmimo::SystemConfig resolve(const Overrides& o) {
  cfmimo::SystemConfig cfg;
  if (!o.config.empty()) cfg = cfmimo::load_config(o.config);
  if (o.combiner) cfg.combiner = cfmimo::parse_combiner(*o.combiner);
  if (o.precoder) cfg.precoder_mode = cfmimo::parse_precoder_mode(*o.precoder);
  if (o.se_path) cfg.se_path = cfmimo::parse_se_path(*o.se_path);
  if (o.mc_samples) cfg.n_r = *o.mc_samples;
  if (o.workers) cfg.workers = *o.workers;
  if (o.seed || o.drops) {
    const std::uint64_t first = o.seed ? *o.seed : cfg.seeds.front();
    const int drops = o.drops ? *o.drops : 1;
    cfg.seeds.clear();
    for (int d = 0; d < drops; ++d) cfg.seeds.push_back(first + static_cast<std::uint64_t>(d));
  }
  return cfg;
}

void write_outputs(const Overrides& o, const cfmimo::SystemConfig& cfg,
                   const cfmimo::SweepResult& r, const std::string& command,
                   const std::string& axis, const std::vector<int>& values) {
  namespace fs = std::filesystem;
  const fs::path dir(o.out);
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw cfmimo::Error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("results.csv");
    cfmimo::write_results_csv(f, r);
  }
  {
    auto f = open("trace.csv");
    cfmimo::write_trace_csv(f, r);
  }
  {
    auto f = open("timing.csv");
    cfmimo::write_timing_csv(f, r);
  }
  {
    auto f = open("meta.json");
    cfmimo::write_meta_json(f, cfg, command, axis, values);
  }
}

void report(const cfmimo::SweepResult& r) {
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::map<int, std::pair<double, int>> per_value;
  for (const auto& gp : r.points) {
    auto& acc = per_value[gp.value];
    acc.first += gp.result.final_sum_se;
    acc.second += 1;
  }
  for (const auto& [value, acc] : per_value) {
    std::cout << "value " << value << ": mean sum SE "
              << cfmimo::format_double(acc.first / acc.second) << " bit/s/Hz over "
              << acc.second << " drop(s)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO uplink simulator"};
  app.require_subcommand(1);

  Overrides run_opts;
  CLI::App* run = app.add_subcommand("run", "evaluate drops at one configuration");
  add_common(run, run_opts);

  Overrides sweep_opts;
  std::string axis;
  std::vector<int> values;
  CLI::App* sw = app.add_subcommand("sweep", "grid over L or N");
  add_common(sw, sweep_opts);
  sw->add_option("--axis", axis, "l | n")->required()->check(CLI::IsMember({"l", "n", "L", "N"}));
  sw->add_option("--values", values, "comma-separated grid values")
      ->required()
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const cfmimo::SystemConfig cfg = resolve(run_opts);
      cfg.validate();
      const cfmimo::SweepResult r = cfmimo::run_drops(cfg);
      write_outputs(run_opts, cfg, r, "run", "", {});
      report(r);
    } else {
      const cfmimo::SystemConfig cfg = resolve(sweep_opts);
      const cfmimo::SweepAxis ax = cfmimo::parse_axis(axis);
      const cfmimo::SweepResult r = cfmimo::sweep(cfg, ax, values);
      write_outputs(sweep_opts, cfg, r, "sweep", std::string(cfmimo::to_string(ax)), values);
      report(r);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
