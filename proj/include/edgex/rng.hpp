#pragma once

#include <cstdint>
#include <random>

namespace edgex {

using rng_t = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Replicate streams are derived from (seed, replicate, grid index) so that
// any subset of replicates can run concurrently and still reproduce bit-for-bit.
inline rng_t make_stream(std::uint64_t seed, std::uint64_t replicate = 0,
                         std::uint64_t grid_index = 0) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  x ^= 0x517cc1b727220a95ULL * (replicate + 1);
  std::uint64_t b = splitmix64(x);
  x ^= 0x2545f4914f6cdd1dULL * (grid_index + 1);
  std::uint64_t c = splitmix64(x);
  std::seed_seq seq{a, b, c};
  return rng_t(seq);
}

inline double uniform01(rng_t& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace edgex
