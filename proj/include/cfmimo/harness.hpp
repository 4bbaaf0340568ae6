// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment orchestration: one drop end to end, grids of drops over L or N,
// and deterministic CSV / JSON output.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/wmmse.hpp"

namespace cfmimo {

inline constexpr const char* kVersion = "0.1.0";

/// One line of results.csv. Rows with ue_id == -1 summarize a drop: they
/// carry the final iteration and the average per-UE SE.
struct SeRow {
  std::uint64_t drop_seed = 0;
  int m = 0;
  int k_total = 0;
  int l = 0;
  int n = 0;
  CombinerKind combiner = CombinerKind::mr;
  PrecoderMode precoder_mode = PrecoderMode::none;
  SePath se_path = SePath::closed;
  int iteration = 0;
  int ue_id = 0;
  double se = 0.0;
  double sum_se = 0.0;
  double wsr = 0.0;
  int n_r = 0;  // 0 on the closed-form path
};

/// One line of trace.csv: optimizer state of one UE after one iteration.
struct TraceRow {
  std::uint64_t drop_seed = 0;
  int l = 0;
  int n = 0;
  int iteration = 0;
  int ue_id = 0;
  double se = 0.0;
  double lambda = 0.0;
  double power = 0.0;
  double wsr = 0.0;
};

struct DropResult {
  std::vector<SeRow> rows;
  std::vector<TraceRow> trace;
  std::vector<std::string> warnings;
  double seconds = 0.0;
  double final_sum_se = 0.0;
  double final_wsr = 0.0;
  int iterations = 0;
};

/// Optimizer iteration budget implied by the precoder mode.
int iteration_budget(const SystemConfig& cfg);

/// scenario -> statistics -> optional optimizer -> SE for one drop. Errors
/// are rethrown with the drop seed attached. `workers` parallelizes the
/// Monte-Carlo loop and per-UE updates.
DropResult run_drop(const SystemConfig& cfg, std::uint64_t drop_seed,
                    int workers = 1);

enum class SweepAxis { l, n };
std::string_view to_string(SweepAxis a);
SweepAxis parse_axis(std::string_view s);

struct GridPoint {
  int value = 0;
  std::uint64_t drop_seed = 0;
  DropResult result;
};

struct SweepResult {
  std::vector<GridPoint> points;  // ordered by (value, drop_seed)
  std::vector<std::string> warnings;
};

/// Runs every (value, seed in cfg.seeds) pair on cfg.worker_count() threads.
/// Sweeping N with an automatic pilot length recomputes it per value;
/// points that violate tau_p <= tau_c are skipped with a warning.
SweepResult sweep(const SystemConfig& cfg, SweepAxis axis,
                  const std::vector<int>& values);

/// Every seed of cfg.seeds at the configured L and N.
SweepResult run_drops(const SystemConfig& cfg);

/// Shortest round-trip decimal rendering, independent of locale.
std::string format_double(double v);

void write_results_csv(std::ostream& out, const SweepResult& r);
void write_trace_csv(std::ostream& out, const SweepResult& r);
void write_timing_csv(std::ostream& out, const SweepResult& r);
/// Config echo, code version and seeds.
void write_meta_json(std::ostream& out, const SystemConfig& cfg,
                     const std::string& command, const std::string& axis,
                     const std::vector<int>& values);

}  // namespace cfmimo
