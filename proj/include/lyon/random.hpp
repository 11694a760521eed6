#pragma once

#include <cstdint>
#include <random>

namespace lyon {

using RandomStream = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for run `run_index` of a batch. Streams depend only on
/// (master_seed, run_index), never on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t run_index) noexcept {
  return mix64(mix64(master_seed) ^ mix64(run_index + 0x632be59bd9b4e019ULL));
}

inline RandomStream make_stream(std::uint64_t master_seed, std::uint64_t run_index) {
  return RandomStream{derive_seed(master_seed, run_index)};
}

/// Uniform double in [0, 1) built from the top 53 bits; identical on every
/// standard library, unlike std::uniform_real_distribution.
inline double unit_uniform(RandomStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace lyon
