// Copyright 2026 The cfmimo Authors
// SPDX-License-Identifier: Apache-2.0

#include "cfmimo/rng.hpp"

#include <cmath>

namespace cfmimo {

Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t a,
             std::uint64_t b) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  const auto tag = static_cast<std::uint64_t>(stream);
  std::seed_seq seq{lo(seed), hi(seed), lo(tag), lo(a), hi(a), lo(b), hi(b)};
  return Rng(seq);
}

cd complex_normal(Rng& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

CMat complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMat out(rows, cols);
  // Column-major fill keeps the draw order identical to vec().
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = complex_normal(rng);
  }
  return out;
}

}  // namespace cfmimo
