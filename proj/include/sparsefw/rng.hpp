#pragma once

#include <cstdint>

namespace sparsefw {

// SplitMix64 (Vigna's reference mixer). 64-bit state, one output per step.
// Test vectors, frozen in test_experiments.cpp: from state 0 the first
// outputs are 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4, 0x06c45d188009454f.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) from the top 53 bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Uniform in {0, ..., bound-1} by rejection, so every value is equally
  // likely for any bound.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  // Fair coin: +1 or -1 from the low bit.
  int next_sign() { return (next_u64() & 1u) ? 1 : -1; }

private:
  std::uint64_t state_;
};

// Seed for trial i of a run seeded with `seed`. Closed form (the i-th output
// of SplitMix64 started at `seed`), so trials can run in any order.
inline std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::uint64_t z = seed + static_cast<std::uint64_t>(trial + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace sparsefw
