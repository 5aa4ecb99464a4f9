#pragma once

#include <cstdint>
#include <random>

namespace glqr {

// Uniform double in [0, 1) built from the top 53 bits of the engine output.
// std::uniform_real_distribution is implementation-defined; this mapping is
// reproducible bit-for-bit across platforms.
inline double canonical_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_double(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * canonical_double(rng);
}

}  // namespace glqr
