#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "noisy_select/context.hpp"
#include "noisy_select/max.hpp"
#include "noisy_select/reduction.hpp"
#include "noisy_select/task.hpp"
#include "noisy_select/tower.hpp"

namespace noisy_select {

struct ThresholdResult {
  IdSet ids;
  int depth = 0;  // deepest recursion level below this call
};

namespace detail {

inline bool passes_threshold(double answer, double v, Direction dir) { return dir == Direction::Max ? answer >= v : answer < v; }

}  // namespace detail

/// Elements with value >= v (Direction::Max) or < v (Direction::Min). Needs an oracle that
/// answers both compare and value requests, e.g. ComparisonFromValue over a value session.
/// `universe` is the instance size n used for the per-level round budget.
inline Task<ThresholdResult> threshold_task(Context& ctx, IdSet xs, double v, double k_estimate, std::size_t universe,
                                            Direction dir = Direction::Max) {
  ThresholdResult result;
  if (xs.empty()) co_return result;
  const auto& c = ctx.constants;
  const double k = std::max(k_estimate, 2.0);
  const double k4 = k * k * k * k;
  const auto parts_wanted = static_cast<std::size_t>(std::min(k * k, static_cast<double>(xs.size())));
  auto parts = detail::random_partition(xs, parts_wanted, ctx.rng);
  const double delta = 1.0 / (c.threshold_delta_c * k4);
  const int r = log_star(static_cast<double>(universe), 2.0) + c.threshold_round_offset;

  std::vector<Task<MaybeId>> firsts;
  for (const auto& part : parts) firsts.push_back(parallel_max_task(ctx, part, r, delta, dir));
  const auto y1 = co_await when_all(std::move(firsts));

  std::vector<Task<MaybeId>> seconds;
  std::vector<std::size_t> second_of(parts.size(), SIZE_MAX);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!y1[i] || parts[i].size() < 2) continue;
    IdSet rest;
    for (Id x : parts[i])
      if (x != *y1[i]) rest.push_back(x);
    second_of[i] = seconds.size();
    seconds.push_back(parallel_max_task(ctx, std::move(rest), r, delta, dir));
  }
  const auto y2 = co_await when_all(std::move(seconds));

  const std::uint64_t tau = detail::ceil_count(c.threshold_tau_c * std::log2(c.threshold_delta_c * k4));
  std::vector<Request> batch;
  std::vector<std::pair<std::size_t, int>> tested;  // (part, 1 or 2)
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (y1[i]) {
      batch.push_back({Query::value(*y1[i]), tau, 1});
      tested.emplace_back(i, 1);
    }
    if (second_of[i] != SIZE_MAX && y2[second_of[i]]) {
      batch.push_back({Query::value(*y2[second_of[i]]), tau, 1});
      tested.emplace_back(i, 2);
    }
  }
  const auto replies = co_await submit(batch);
  std::vector<std::uint64_t> p1(parts.size(), 0);
  std::vector<std::uint64_t> p2(parts.size(), 0);
  for (std::size_t j = 0; j < tested.size(); ++j) {
    std::uint64_t pass = 0;
    for (double a : replies[j].values) pass += detail::passes_threshold(a, v, dir) ? 1 : 0;
    (tested[j].second == 1 ? p1 : p2)[tested[j].first] = pass;
  }

  std::vector<Task<ThresholdResult>> deeper;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (2 * p1[i] < tau) continue;
    if (2 * p2[i] < tau) result.ids.push_back(*y1[i]);
    else deeper.push_back(threshold_task(ctx, parts[i], v, k * k, universe, dir));
  }
  if (!deeper.empty()) {
    const auto children = co_await when_all(std::move(deeper));
    for (const auto& child : children) {
      result.ids.insert(result.ids.end(), child.ids.begin(), child.ids.end());
      result.depth = std::max(result.depth, child.depth + 1);
    }
  }
  std::sort(result.ids.begin(), result.ids.end());
  co_return result;
}

struct MetaBudget {
  std::uint64_t queries = 0;
  std::uint64_t rounds = 0;
};

/// Query and round caps of the two-sided runner for an instance of size n.
inline MetaBudget threshold_meta_budget(std::size_t n, const Constants& c) {
  const double nd = std::max<double>(static_cast<double>(n), 4.0);
  const double q = c.meta_query_c * nd * std::log2(nd);
  const double r = c.meta_round_c * log_star(nd, 2.0) * std::log2(std::log2(nd)) + c.meta_round_c;
  return {static_cast<std::uint64_t>(std::ceil(q)), static_cast<std::uint64_t>(std::ceil(r))};
}

/// Runs the search for elements >= v alongside the search for elements < v, one merged round
/// at a time; the first to finish decides (the second by complement). FAIL when the caps are hit.
inline Task<std::optional<ThresholdResult>> threshold_meta_task(Context& ctx, IdSet xs, double v, std::size_t universe,
                                                                MetaBudget budget) {
  const double k0 = ctx.constants.threshold_initial_estimate;
  auto outcome = co_await race(threshold_task(ctx, xs, v, k0, universe, Direction::Max),
                               threshold_task(ctx, xs, v, k0, universe, Direction::Min),
                               RaceBudget{budget.queries, budget.rounds, 2ULL * ctx.constants.reduction_repeats});
  if (!outcome.value) co_return std::nullopt;
  if (outcome.winner == 0) co_return std::move(*outcome.value);
  ThresholdResult complement;
  complement.depth = outcome.value->depth;
  std::vector<bool> below(universe, false);
  for (Id x : outcome.value->ids) below[x] = true;
  for (Id x : xs)
    if (!below[x]) complement.ids.push_back(x);
  std::sort(complement.ids.begin(), complement.ids.end());
  co_return complement;
}

namespace detail {

inline Outcome threshold_outcome(Oracle& oracle, Task<std::optional<ThresholdResult>> task) {
  const auto before = oracle.accounting();
  auto res = drive(oracle, std::move(task));
  Outcome out;
  if (res) {
    out.ids = std::move(res->ids);
    out.depth = res->depth;
  }
  out.accounting = oracle.accounting() - before;
  return out;
}

inline Task<std::optional<ThresholdResult>> as_optional(Task<ThresholdResult> task) {
  co_return co_await std::move(task);
}

}  // namespace detail

/// One-sided search on a value-model oracle; comparisons go through the value adapter.
inline Outcome threshold_v(OracleSession& value_oracle, Context& ctx, IdSet xs, double v, double k_estimate = 2.0) {
  ComparisonFromValue adapter(value_oracle, ctx.constants.reduction_repeats);
  return detail::threshold_outcome(
      adapter, detail::as_optional(threshold_task(ctx, std::move(xs), v, k_estimate, value_oracle.size())));
}

inline Outcome threshold_meta(OracleSession& value_oracle, Context& ctx, IdSet xs, double v) {
  ComparisonFromValue adapter(value_oracle, ctx.constants.reduction_repeats);
  const auto budget = threshold_meta_budget(value_oracle.size(), ctx.constants);
  return detail::threshold_outcome(adapter,
                                   threshold_meta_task(ctx, std::move(xs), v, value_oracle.size(), budget));
}

}  // namespace noisy_select
