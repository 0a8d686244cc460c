#pragma once

#include <cstdint>
#include <vector>

#include "noisy_select/oracle.hpp"
#include "noisy_select/query.hpp"

namespace noisy_select {

/// Outcome counts of repeated three-outcome comparisons of x against y, where "wins" means
/// strictly better in the given direction.
struct DuelTally {
  std::uint64_t x_wins = 0;
  std::uint64_t y_wins = 0;
  std::uint64_t ties = 0;
};

/// Appends `count` three-outcome comparisons of x against y, each made of two majorities of
/// `repeats` answers ("x at least as good as y?" and the converse).
inline void add_duels(std::vector<Request>& batch, Id x, Id y, std::uint64_t count, std::uint32_t repeats,
                      Direction dir) {
  const Id a = dir == Direction::Max ? x : y;
  const Id b = dir == Direction::Max ? y : x;
  batch.push_back({Query::compare(a, b), count * repeats, repeats});
  batch.push_back({Query::compare(b, a), count * repeats, repeats});
}

/// Reads the two replies appended by `add_duels`.
inline DuelTally tally_duels(const Reply& x_side, const Reply& y_side, std::uint32_t repeats) {
  DuelTally t;
  for (std::size_t i = 0; i < x_side.yes.size(); ++i) {
    switch (decode_three_outcome(2 * x_side.yes[i] > repeats, 2 * y_side.yes[i] > repeats)) {
      case Comparison::XGreater: ++t.x_wins; break;
      case Comparison::YGreater: ++t.y_wins; break;
      case Comparison::Equal: ++t.ties; break;
    }
  }
  return t;
}

}  // namespace noisy_select
