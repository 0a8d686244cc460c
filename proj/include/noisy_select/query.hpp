#pragma once

#include <cstdint>
#include <vector>

#include "noisy_select/instance.hpp"

namespace noisy_select {

enum class QueryKind : std::uint8_t { Value, Compare };

/// A single oracle question: "value of x?" or "is value(x) >= value(y)?".
struct Query {
  QueryKind kind = QueryKind::Value;
  Id x = 0;
  Id y = 0;

  static constexpr Query value(Id x) noexcept { return {QueryKind::Value, x, 0}; }
  static constexpr Query compare(Id x, Id y) noexcept { return {QueryKind::Compare, x, y}; }
  friend bool operator==(const Query&, const Query&) = default;
};

/// `repeat` independent copies of one query, reported in groups of `group` consecutive answers.
/// Each copy costs one query.
struct Request {
  Query query;
  std::uint64_t repeat = 1;
  std::uint64_t group = 1;
};

/// Answers to one Request, one entry per group:
///   compare -> number of "yes" answers in the group;
///   value   -> most frequent answer in the group (ties to the larger value).
struct Reply {
  std::vector<std::uint32_t> yes;
  std::vector<double> values;
};

struct Accounting {
  std::uint64_t queries = 0;
  std::uint64_t rounds = 0;

  friend Accounting operator-(Accounting a, Accounting b) noexcept {
    return {a.queries - b.queries, a.rounds - b.rounds};
  }
  friend bool operator==(const Accounting&, const Accounting&) = default;
};

/// Orientation of a selection: Max keeps the larger element of a comparison, Min the smaller.
enum class Direction : std::uint8_t { Max, Min };

}  // namespace noisy_select
