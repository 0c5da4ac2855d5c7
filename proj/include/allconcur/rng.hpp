#pragma once

#include <cstdint>

namespace allconcur {

// SplitMix64. Hand-rolled (not std::mt19937 + distributions) so that
// schedules are byte-identical across platforms and standard libraries.
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Multiply-shift; bias is < n/2^64, irrelevant here.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform in [0, 1).
  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Decorrelated stream for schedule i of a campaign seeded with s.
  static uint64_t substream(uint64_t s, uint64_t i) {
    Rng r(s ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    r.next();
    return r.next();
  }
};

}  // namespace allconcur
