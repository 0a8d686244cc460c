#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace noisy_select {

// Counter-based randomness. Every oracle answer draws its coin from
// (key, global query index) only, so answers do not depend on evaluation order.

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Word number `counter` of the stream identified by `key` (splitmix64 indexing).
constexpr std::uint64_t stream_word(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix64(key + (counter + 1) * kGolden);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t salt) noexcept {
  return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + salt * kGolden);
}

/// Uniform integer in [0, bound) from one 64-bit word (multiply-shift).
constexpr std::uint64_t bounded(std::uint64_t word, std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(word) * bound) >> 64);
}

/// A word below this marks a lie: probability 1/3 up to 2^-64.
constexpr std::uint64_t kLieBelow = 0x5555555555555555ULL;

using Rng = std::mt19937_64;

inline double unit_interval(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool flip(Rng& rng, double p) { return unit_interval(rng) < p; }

/// Fisher-Yates with multiply-shift indices; identical output on every standard library.
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(rng(), i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace noisy_select
