#pragma once

#include <cstdint>
#include <random>

namespace womac {

/// Every random stream in the library is a std::mt19937_64 seeded through
/// derive_seed, so stream r of a run depends only on (seed, r).
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// derive_seed(seed, stream) = splitmix64(splitmix64(seed) ^ splitmix64(~stream)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(derive_seed(seed, stream)); }

}  // namespace womac
