#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "flowbasis/diagnostics.hpp"
#include "flowbasis/flow.hpp"

namespace flowbasis::testing {

// Uniform in [lo, hi) from raw 64-bit draws, reproducible across platforms.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// A flow far from the identity: every parameter random, then normalized.
inline FlowParams random_flow(std::uint64_t seed, int hidden = 16, int blocks = 1,
                              double alpha = 14.0, double beta = 0.0, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  FlowParams p = identity_flow(hidden, blocks, alpha, beta);
  for (auto& b : p.blocks) {
    for (auto& w : b.w_in) w = scale * uniform(rng, -1.0, 1.0);
    for (auto& w : b.b_in) w = scale * uniform(rng, -1.0, 1.0);
    for (auto& w : b.w_out) w = scale * uniform(rng, -1.0, 1.0);
    b.b_out = 0.1 * uniform(rng, -1.0, 1.0);
  }
  normalize(p);
  return p;
}

// Silences library warnings for the lifetime of the object.
struct QuietWarnings {
  QuietWarnings() { set_warning_handler([](std::string_view) {}); }
  ~QuietWarnings() { set_warning_handler(nullptr); }
};

}  // namespace flowbasis::testing
