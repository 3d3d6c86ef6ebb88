#pragma once

// Counter-based random substreams.
//
// Every resample, permutation and inner bootstrap draws from its own
// generator whose state is a pure function of (seed, keys...). Work items can
// therefore run on any thread, in any order, and still produce identical
// results.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace strata {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a; stable across platforms and runs (unlike std::hash).
constexpr std::uint64_t stable_hash(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Mixes a seed with a list of keys into a new 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept;

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Generator for the substream identified by (seed, keys...).
inline Xoshiro256pp substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
  return Xoshiro256pp(derive_seed(seed, keys));
}

/// Uniform integer in [0, bound) without modulo bias (Lemire's method).
std::uint64_t uniform_index(Xoshiro256pp& rng, std::uint64_t bound) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Xoshiro256pp& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace strata
