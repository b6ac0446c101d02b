#pragma once

#include <cstdint>

namespace smallforms {

// Counter-style splittable generator.  Every Monte Carlo sample derives its
// own substream from (seed, sample index), so results are independent of how
// samples are partitioned across workers.  The reproducibility contract is
// "same seed, same stream", not a particular statistical pedigree.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    return mix(state);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Deterministic substream for the index-th sample of a seeded experiment.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = SplitMix64::mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
  return SplitMix64(s);
}

}  // namespace smallforms
