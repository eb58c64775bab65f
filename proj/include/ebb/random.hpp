#pragma once

#include <cstdint>

namespace ebb {

// splitmix64 finalizer; the one fixed hash used everywhere determinism matters.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 bits of precision.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1} (n > 0). Modulo bias is irrelevant at our n.
  uint64_t next_below(uint64_t n) { return next() % n; }
};

// Counter-based substream derivation: stream `index` of a master seed is a
// pure function of (master, index), so work can be split across any number
// of workers without changing the numbers drawn.
inline uint64_t substream_seed(uint64_t master, uint64_t index) {
  return mix64(master ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

}  // namespace ebb
