#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "noisy_select/constants.hpp"
#include "noisy_select/instance.hpp"
#include "noisy_select/query.hpp"
#include "noisy_select/rng.hpp"

namespace noisy_select {

/// Algorithm-side state: the algorithm's own coins and the constants in force.
struct Context {
  Rng rng;
  Constants constants;

  explicit Context(std::uint64_t seed, Constants c = Constants::defaults())
      : rng(derive_key(seed, 0xa1c0ULL)), constants(std::move(c)) {}
};

/// Result of one algorithm run: ids, or nothing for FAIL.
struct Outcome {
  std::optional<std::vector<Id>> ids;
  Accounting accounting;
  int depth = 0;                // threshold: recursion depth; oblivious top-k: guesses tried
  std::uint64_t block_sum = 0;  // distinct_top: final sum of block sizes

  bool failed() const noexcept { return !ids.has_value(); }
};

using IdSet = std::vector<Id>;
using MaybeId = std::optional<Id>;
using MaybeIds = std::optional<IdSet>;

namespace detail {

/// Random partition into `parts` contiguous slices of a shuffled copy; sizes differ by at most one.
inline std::vector<IdSet> random_partition(const IdSet& xs, std::size_t parts, Rng& rng) {
  IdSet shuffled = xs;
  shuffle(std::span(shuffled), rng);
  std::vector<IdSet> out(parts);
  const std::size_t base = shuffled.size() / parts;
  const std::size_t extra = shuffled.size() % parts;
  std::size_t at = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    out[i].assign(shuffled.begin() + static_cast<std::ptrdiff_t>(at), shuffled.begin() + static_cast<std::ptrdiff_t>(at + len));
    at += len;
  }
  return out;
}

}  // namespace detail

}  // namespace noisy_select
