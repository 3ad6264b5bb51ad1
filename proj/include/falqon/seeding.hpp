#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace falqon {

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL);

enum class SeedPurpose : std::uint64_t {
  graph = 1,
  anneal = 2,
  regenerate = 3,
  test = 4,
};

/// Seed for one instance of an ensemble, from the master seed and its coordinates.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t size, std::uint64_t index,
                          SeedPurpose purpose);

// std::mt19937_64 is fully specified by the standard; the distributions are not,
// so the conversions below are written out to keep streams identical across toolchains.
using Engine = std::mt19937_64;

inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (limit == 0 || r < limit) return r % bound;
  }
}

}  // namespace falqon
