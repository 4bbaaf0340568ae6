// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "cfmimo/types.hpp"

namespace cfmimo {

using Rng = std::mt19937_64;

// Named sub-streams of a drop seed. Each consumer derives its own generator
// so that components can be regenerated independently of each other.
enum class Stream : std::uint64_t {
  geometry = 1,
  shadowing = 2,
  coupling = 3,
  channel = 4,
  pilot_noise = 5,
  realization = 6,
  perturbation = 7,
};

Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t a = 0,
             std::uint64_t b = 0);

/// Draw from CN(0, 1).
cd complex_normal(Rng& rng);

CMat complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace cfmimo
