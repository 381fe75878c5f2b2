#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace acqbench {

/// SplitMix64 finalizer. Used as the mixing function for counter-based seeding.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and an ordered list of keys.
/// Identical (parent, keys) always produce the identical child.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(parent);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

// Stream purposes for seeds keyed by (run seed, round, purpose).
enum class Purpose : std::uint64_t {
  InitialLabels = 1,
  PoolDraw = 2,
  Train = 3,
  Acquire = 4,
  ModelInit = 5,
  Split = 6,
  Dataset = 7,
};

inline std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t round, Purpose p) noexcept {
  return derive_seed(run_seed, {round, static_cast<std::uint64_t>(p)});
}

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace acqbench
