// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "cfmimo/config.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

TEST_SUITE("config") {

TEST_CASE("defaults echo the reference simulation setup") {
  const SystemConfig cfg;
  CHECK(std::abs(cfg.sigma2 - std::pow(10.0, -12.4)) <= 1e-12 * cfg.sigma2);
  CHECK(cfg.power(0) == 0.2);
  CHECK(cfg.tau_c == 200);
  CHECK(cfg.i_max == 20);
  CHECK(cfg.epsilon == 5e-4);
  CHECK(cfg.m == 20);
  CHECK(cfg.k == 10);
  CHECK(cfg.n == 4);
  CHECK(cfg.bandwidth == 20e6);
  CHECK(cfg.pilot_length() == 20);  // K N / 2
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("automatic pilot length is a multiple of N") {
  SystemConfig cfg;
  cfg.k = 5;
  cfg.n = 2;
  CHECK(cfg.pilot_length() == 6);
  cfg.n = 6;
  CHECK(cfg.pilot_length() == 18);
  cfg.k = 4;
  cfg.n = 2;
  CHECK(cfg.pilot_length() == 4);
}

TEST_CASE("parse and format round trip") {
  std::istringstream in(
      "# comment\n"
      "m = 5\n"
      "k=4\n"
      "l = 3   # trailing\n"
      "n = 2\n"
      "tau_p = 8\n"
      "sigma2_dbm = -90\n"
      "p = 0.1, 0.2, 0.3, 0.4\n"
      "mu = 1,2,3,4\n"
      "combiner = lmmse\n"
      "precoder_mode = wmmse1\n"
      "se_path = mc\n"
      "seeds = 7, 8, 9\n"
      "common_random_numbers = false\n"
      "workers = 3\n");
  const SystemConfig cfg = parse_config(in);
  CHECK(cfg.m == 5);
  CHECK(cfg.k == 4);
  CHECK(cfg.l == 3);
  CHECK(cfg.tau_p == 8);
  CHECK(std::abs(cfg.sigma2 - 1e-12) < 1e-24);
  CHECK(cfg.power(2) == 0.3);
  CHECK(cfg.weight(3) == 4.0);
  CHECK(cfg.combiner == CombinerKind::lmmse);
  CHECK(cfg.precoder_mode == PrecoderMode::wmmse1);
  CHECK(cfg.se_path == SePath::mc);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{7, 8, 9});
  CHECK_FALSE(cfg.common_random_numbers);
  CHECK(cfg.worker_count() == 3);

  std::istringstream again(format_config(cfg));
  const SystemConfig back = parse_config(again);
  CHECK(format_config(back) == format_config(cfg));
  CHECK(back.sigma2 == cfg.sigma2);
}

TEST_CASE("unknown keys and malformed values are rejected with the line number") {
  std::istringstream unknown("m = 3\nfoo = 1\n");
  try {
    parse_config(unknown);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream bad("m = three\n");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  std::istringstream noeq("m 3\n");
  CHECK_THROWS_AS(parse_config(noeq), ConfigError);
  CHECK_THROWS_AS(parse_combiner("zf"), ConfigError);
}

TEST_CASE("validation catches infeasible configurations") {
  SystemConfig cfg;
  cfg.tau_p = 6;  // not a multiple of n = 4
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.tau_p = 204;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SystemConfig{};
  cfg.combiner = CombinerKind::lmmse;
  cfg.se_path = SePath::closed;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SystemConfig{};
  cfg.p = {0.1, 0.2};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SystemConfig{};
  cfg.mu = {-1.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("named random streams are reproducible and distinct") {
  Rng a = make_rng(5, Stream::channel, 1, 2);
  Rng b = make_rng(5, Stream::channel, 1, 2);
  Rng c = make_rng(5, Stream::channel, 2, 1);
  Rng d = make_rng(5, Stream::shadowing, 1, 2);
  const auto va = a();
  CHECK(va == b());
  CHECK(va != c());
  CHECK(va != d());
}

TEST_CASE("complex normal draws have unit power") {
  Rng rng = make_rng(1, Stream::channel);
  double power = 0.0, re = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const cd z = complex_normal(rng);
    power += std::norm(z);
    re += z.real() * z.real();
  }
  CHECK(std::abs(power / n - 1.0) < 0.01);
  CHECK(std::abs(re / n - 0.5) < 0.01);
}

}  // TEST_SUITE
