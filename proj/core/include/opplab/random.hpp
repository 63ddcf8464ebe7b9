#pragma once

#include <cstdint>
#include <random>

namespace opplab {

// Independent generator for (seed, stream). Every sampled quantity in the
// library draws from a substream keyed by its task index, so results do not
// depend on how tasks are scheduled.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// library implementations, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace opplab
