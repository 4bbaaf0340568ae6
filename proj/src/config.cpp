// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <locale>
#include <sstream>
#include <thread>

namespace cfmimo {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for key '" +
                      std::string(key) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (auto item : split(text, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for key '" +
                    std::string(key) + "'");
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

std::string_view to_string(CombinerKind c) {
  return c == CombinerKind::mr ? "mr" : "lmmse";
}

std::string_view to_string(PrecoderMode p) {
  switch (p) {
    case PrecoderMode::none: return "none";
    case PrecoderMode::wmmse1: return "wmmse1";
    case PrecoderMode::iwmmse: return "iwmmse";
  }
  return "?";
}

std::string_view to_string(SePath s) { return s == SePath::mc ? "mc" : "closed"; }

CombinerKind parse_combiner(std::string_view s) {
  if (s == "mr") return CombinerKind::mr;
  if (s == "lmmse") return CombinerKind::lmmse;
  throw ConfigError("unknown combiner '" + std::string(s) + "' (mr|lmmse)");
}

PrecoderMode parse_precoder_mode(std::string_view s) {
  if (s == "none") return PrecoderMode::none;
  if (s == "wmmse1") return PrecoderMode::wmmse1;
  if (s == "iwmmse") return PrecoderMode::iwmmse;
  throw ConfigError("unknown precoder mode '" + std::string(s) +
                    "' (none|wmmse1|iwmmse)");
}

SePath parse_se_path(std::string_view s) {
  if (s == "mc") return SePath::mc;
  if (s == "closed") return SePath::closed;
  throw ConfigError("unknown se path '" + std::string(s) + "' (mc|closed)");
}

int SystemConfig::pilot_length() const {
  return tau_p > 0 ? tau_p : n * ((k + 1) / 2);
}

double SystemConfig::power(int ue) const {
  return p.size() == 1 ? p.front() : p.at(static_cast<std::size_t>(ue));
}

double SystemConfig::weight(int ue) const {
  return mu.size() == 1 ? mu.front() : mu.at(static_cast<std::size_t>(ue));
}

double SystemConfig::dominance_factor() const {
  return dominance > 0.0 ? dominance : 2.0 * l * n;
}

int SystemConfig::worker_count() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (m < 1 || k < 1 || l < 1 || n < 1) fail("m, k, l and n must be >= 1");
  if (!(area_side > 0.0)) fail("area_side must be positive");
  const int tp = pilot_length();
  if (tp % n != 0) {
    fail("tau_p = " + std::to_string(tp) + " is not a multiple of n = " +
         std::to_string(n));
  }
  if (tp > tau_c) {
    fail("tau_p = " + std::to_string(tp) + " exceeds tau_c = " +
         std::to_string(tau_c));
  }
  if (!(sigma2 > 0.0)) fail("sigma2 must be positive");
  if (p.empty() || (p.size() != 1 && static_cast<int>(p.size()) != k)) {
    fail("p needs one entry or k entries");
  }
  if (mu.empty() || (mu.size() != 1 && static_cast<int>(mu.size()) != k)) {
    fail("mu needs one entry or k entries");
  }
  for (double v : p) if (!(v > 0.0)) fail("power budgets must be positive");
  for (double v : mu) if (!(v > 0.0)) fail("priority weights must be positive");
  if (n_r < 1) fail("n_r must be >= 1");
  if (i_max < 1) fail("i_max must be >= 1");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (seeds.empty()) fail("at least one seed is required");
  if (se_path == SePath::closed && combiner != CombinerKind::mr) {
    fail("the closed-form path requires combiner = mr");
  }
}

void set_config_value(SystemConfig& cfg, std::string_view key,
                      std::string_view value) {
  value = trim(value);
  if (key == "m") cfg.m = parse_number<int>(key, value);
  else if (key == "k") cfg.k = parse_number<int>(key, value);
  else if (key == "l") cfg.l = parse_number<int>(key, value);
  else if (key == "n") cfg.n = parse_number<int>(key, value);
  else if (key == "area_side") cfg.area_side = parse_number<double>(key, value);
  else if (key == "tau_c") cfg.tau_c = parse_number<int>(key, value);
  else if (key == "tau_p") cfg.tau_p = value == "auto" ? 0 : parse_number<int>(key, value);
  else if (key == "sigma2") cfg.sigma2 = parse_number<double>(key, value);
  else if (key == "sigma2_dbm") cfg.sigma2 = dbm_to_watt(parse_number<double>(key, value));
  else if (key == "p") cfg.p = parse_list<double>(key, value);
  else if (key == "mu") cfg.mu = parse_list<double>(key, value);
  else if (key == "bandwidth") cfg.bandwidth = parse_number<double>(key, value);
  else if (key == "n_r") cfg.n_r = parse_number<int>(key, value);
  else if (key == "i_max") cfg.i_max = parse_number<int>(key, value);
  else if (key == "epsilon") cfg.epsilon = parse_number<double>(key, value);
  else if (key == "combiner") cfg.combiner = parse_combiner(value);
  else if (key == "precoder_mode") cfg.precoder_mode = parse_precoder_mode(value);
  else if (key == "se_path") cfg.se_path = parse_se_path(value);
  else if (key == "seeds") cfg.seeds = parse_list<std::uint64_t>(key, value);
  else if (key == "dominance") cfg.dominance = parse_number<double>(key, value);
  else if (key == "common_random_numbers") cfg.common_random_numbers = parse_bool(key, value);
  else if (key == "workers") cfg.workers = parse_number<int>(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

SystemConfig parse_config(std::istream& in, SystemConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    try {
      set_config_value(base, trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

SystemConfig load_config(const std::string& path, SystemConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

std::string format_config(const SystemConfig& cfg) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "m = " << cfg.m << "\n"
     << "k = " << cfg.k << "\n"
     << "l = " << cfg.l << "\n"
     << "n = " << cfg.n << "\n"
     << "area_side = " << cfg.area_side << "\n"
     << "tau_c = " << cfg.tau_c << "\n"
     << "tau_p = " << (cfg.tau_p > 0 ? std::to_string(cfg.tau_p) : "auto") << "\n"
     << "sigma2 = " << cfg.sigma2 << "\n"
     << "p = " << join(cfg.p) << "\n"
     << "mu = " << join(cfg.mu) << "\n"
     << "bandwidth = " << cfg.bandwidth << "\n"
     << "n_r = " << cfg.n_r << "\n"
     << "i_max = " << cfg.i_max << "\n"
     << "epsilon = " << cfg.epsilon << "\n"
     << "combiner = " << to_string(cfg.combiner) << "\n"
     << "precoder_mode = " << to_string(cfg.precoder_mode) << "\n"
     << "se_path = " << to_string(cfg.se_path) << "\n"
     << "seeds = " << join(cfg.seeds) << "\n"
     << "dominance = " << cfg.dominance << "\n"
     << "common_random_numbers = " << (cfg.common_random_numbers ? "true" : "false") << "\n"
     << "workers = " << cfg.workers << "\n";
  return os.str();
}

}  // namespace cfmimo
