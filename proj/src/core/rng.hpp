#pragma once

#include <cstdint>

namespace cms {

// Deterministic RNG built on the splitmix64 mix function.
//
// Every randomized operation derives one stream per work item (pair index,
// particle index, word index, ...) via `derive(seed, item)`.  Results of a
// parallel loop therefore depend only on (seed, item), never on how items are
// distributed over threads, which is what makes artifacts byte-identical
// across `--threads` settings.
struct RngStream {
  std::uint64_t state = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static RngStream derive(std::uint64_t seed, std::uint64_t item) {
    RngStream r;
    r.state = mix(mix(seed) ^ (item * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL));
    return r;
  }

  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }
};

}  // namespace cms
