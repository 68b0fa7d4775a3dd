#pragma once

#include <cstdint>

namespace mel {

// SplitMix64: small, fast, and stable across platforms, which matters more
// here than statistical heft. Streams are derived by seed mixing so every
// (scenario, policy, t_max, learner) site gets an independent deterministic
// sequence.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  std::uint64_t index(std::uint64_t n) { return next() % n; }
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  SplitMix64 s(a ^ (0x9e3779b97f4a7c15ull + (b << 1)));
  s.next();
  return s.next();
}

}  // namespace mel
