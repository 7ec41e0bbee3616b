#pragma once

#include <cstdint>
#include <random>

namespace ouspec {

// SplitMix64 finalizer. Bijective on 64-bit words, so distinct inputs give
// distinct, well-scrambled outputs even for sequential seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `stream` under a root seed. Every Monte Carlo item
/// (trajectory, sample, restart, repetition) owns one substream, so results
/// do not depend on how items are split across threads.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed ^ mix64(stream));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return std::mt19937_64{derive_seed(seed, stream)};
}

}  // namespace ouspec
