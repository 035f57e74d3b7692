#pragma once

// Portable random helpers. std::mt19937_64's output sequence is fixed by the
// standard, but the std distributions are not, so sampling goes through the
// functions below to keep seeded results identical across standard libraries.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kcg {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `index` of `parent`. Stable across versions:
/// seed = splitmix64(parent ^ splitmix64(index + 1)).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(parent ^ splitmix64(index + 1));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  for (std::uint64_t i : path) parent = derive_seed(parent, i);
  return parent;
}

/// Uniform double in [0, 1) with 53 random bits.
template <class URBG>
double uniform01(URBG& rng) {
  static_assert(URBG::max() - URBG::min() == ~std::uint64_t{0}, "needs a 64-bit engine");
  return static_cast<double>((rng() - URBG::min()) >> 11) * 0x1.0p-53;
}

/// True with probability p. Degenerate p (0 or 1) consumes no randomness.
template <class URBG>
bool bernoulli(URBG& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01(rng) < p;
}

/// Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
__extension__ using uint128 = unsigned __int128;

template <class URBG>
std::uint64_t uniform_index(URBG& rng, std::uint64_t n) {
  uint128 m = static_cast<uint128>(rng() - URBG::min()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<uint128>(rng() - URBG::min()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace kcg
