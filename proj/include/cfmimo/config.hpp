// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

enum class CombinerKind { mr, lmmse };
enum class PrecoderMode { none, wmmse1, iwmmse };
enum class SePath { mc, closed };

std::string_view to_string(CombinerKind c);
std::string_view to_string(PrecoderMode p);
std::string_view to_string(SePath s);
CombinerKind parse_combiner(std::string_view s);
PrecoderMode parse_precoder_mode(std::string_view s);
SePath parse_se_path(std::string_view s);

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Every scalar of one experiment. Defaults reproduce the reference
/// simulation setup (20 APs, 10 UEs, -94 dBm noise, 200 mW, tau_c = 200).
struct SystemConfig {
  int m = 20;
  int k = 10;
  int l = 2;
  int n = 4;
  double area_side = 1000.0;
  int tau_c = 200;
  /// Pilot length; 0 selects n * ceil(k / 2) (equal to k n / 2 for even k).
  int tau_p = 0;
  double sigma2 = dbm_to_watt(-94.0);
  /// Per-UE power budgets in watts; a single entry is broadcast.
  std::vector<double> p = {0.2};
  /// Per-UE priority weights; a single entry is broadcast.
  std::vector<double> mu = {1.0};
  double bandwidth = 20e6;
  int n_r = 1000;
  int i_max = 20;
  double epsilon = 5e-4;
  CombinerKind combiner = CombinerKind::mr;
  PrecoderMode precoder_mode = PrecoderMode::iwmmse;
  SePath se_path = SePath::closed;
  std::vector<std::uint64_t> seeds = {1};
  /// Power multiplier of the dominant transmit eigendirection of each
  /// coupling matrix; 0 selects 2 * l * n.
  double dominance = 0.0;
  /// Reuse the same Monte-Carlo realizations in every optimizer iteration.
  bool common_random_numbers = true;
  /// Worker threads; 0 uses the hardware concurrency.
  int workers = 0;

  int pilot_length() const;
  double power(int ue) const;
  double weight(int ue) const;
  double dominance_factor() const;
  int worker_count() const;
  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Parses `key = value` lines ('#' starts a comment). Unknown keys and
/// malformed values throw ConfigError.
SystemConfig parse_config(std::istream& in, SystemConfig base = {});
SystemConfig load_config(const std::string& path, SystemConfig base = {});

/// Applies one `key = value` assignment.
void set_config_value(SystemConfig& cfg, std::string_view key,
                      std::string_view value);

/// Key-value rendering that parse_config reads back unchanged.
std::string format_config(const SystemConfig& cfg);

}  // namespace cfmimo
