#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "noisy_select/context.hpp"
#include "noisy_select/errors.hpp"
#include "noisy_select/oracle.hpp"
#include "noisy_select/task.hpp"

namespace noisy_select {

/// Asks x `mu` times in one round and returns the most frequent answer (ties to the larger value).
inline Task<double> super_query_task(Id x, std::uint64_t mu) {
  if (mu == 0) throw ParameterError("super_query: mu must be positive");
  std::vector<Request> batch{{Query::value(x), mu, mu}};
  const auto replies = co_await submit(batch);
  co_return replies[0].values[0];
}

inline double super_query(Oracle& oracle, Id x, std::uint64_t mu) { return drive(oracle, super_query_task(x, mu)); }

struct DistinctTopResult {
  MaybeIds ids;
  std::uint64_t block_sum = 0;  // sum of current block sizes n(x) when the run ended
  std::uint64_t super_queries = 0;
};

/// Rank-k in the value model on a tie-free instance: every element is asked in blocks of
/// 12, 24, 48, ... queries; a block's answer is its mode. Blocks are doubled to resolve
/// equal answers and to confirm the current k largest answers up to 20 log2 n queries.
inline Task<DistinctTopResult> distinct_top_task(Context& ctx, IdSet xs, std::size_t k) {
  if (k == 0 || k > xs.size()) throw ParameterError("distinct_top: need 1 <= k <= |X|");
  const auto& c = ctx.constants;
  const double n = static_cast<double>(xs.size());
  const double bar = c.distinct_bar_c * std::log2(n);
  const double budget = c.distinct_budget_c * (n + static_cast<double>(k) * std::log2(n));
  const double hard_cap = c.distinct_hard_cap * budget;

  std::map<Id, std::uint64_t> block;
  std::map<Id, double> answer;
  std::map<double, std::set<Id>, std::greater<>> holders;
  std::set<double, std::greater<>> colliding;
  DistinctTopResult result;
  std::uint64_t spent = 0;

  auto place = [&](Id x, double v) {
    auto& h = holders[v];
    h.insert(x);
    if (h.size() == 2) colliding.insert(v);
    answer[x] = v;
  };
  auto unplace = [&](Id x) {
    const double v = answer.at(x);
    auto it = holders.find(v);
    it->second.erase(x);
    if (it->second.size() == 1) colliding.erase(v);
    if (it->second.empty()) holders.erase(it);
  };

  {
    std::vector<Request> batch;
    for (Id x : xs) {
      block[x] = c.distinct_block;
      batch.push_back({Query::value(x), c.distinct_block, c.distinct_block});
    }
    const auto replies = co_await submit(batch);
    for (std::size_t i = 0; i < xs.size(); ++i) place(xs[i], replies[i].values[0]);
    result.block_sum = spent = c.distinct_block * xs.size();
    result.super_queries = xs.size();
  }

  // The k largest current answers, each held by exactly one element that reached the bar.
  auto settled = [&] {
    std::size_t seen = 0;
    for (const auto& [v, h] : holders) {
      if (seen == k) break;
      if (h.size() != 1 || static_cast<double>(block[*h.begin()]) < bar) return false;
      ++seen;
    }
    return seen == k;
  };

  for (;;) {
    Id pick = 0;
    bool found = false;
    if (!colliding.empty()) {
      const auto& h = holders.at(*colliding.begin());
      for (Id x : h)
        if (!found || block[x] < block[pick]) {
          pick = x;
          found = true;
        }
    } else {
      std::size_t seen = 0;
      for (const auto& [v, h] : holders) {
        if (seen++ == k) break;
        const Id x = *h.begin();
        if (static_cast<double>(block[x]) < bar) {
          pick = x;
          found = true;
          break;
        }
      }
    }
    if (found) {
      block[pick] *= 2;
      result.block_sum += block[pick] / 2;
      spent += block[pick];
      ++result.super_queries;
      const double v = co_await super_query_task(pick, block[pick]);
      unplace(pick);
      place(pick, v);
      if (static_cast<double>(result.block_sum) > budget || static_cast<double>(spent) > hard_cap) co_return result;
    }
    if (settled()) break;
  }
  IdSet out;
  std::size_t seen = 0;
  for (const auto& [v, h] : holders) {
    if (seen++ == k) break;
    out.push_back(*h.begin());
  }
  std::sort(out.begin(), out.end());
  result.ids = std::move(out);
  co_return result;
}

inline Outcome distinct_top(OracleSession& value_oracle, Context& ctx, IdSet xs, std::size_t k) {
  if (!value_oracle.instance().all_distinct()) throw ParameterError("distinct_top: instance has equal values");
  const auto before = value_oracle.accounting();
  auto res = drive(value_oracle, distinct_top_task(ctx, std::move(xs), k));
  Outcome out;
  out.ids = std::move(res.ids);
  out.block_sum = res.block_sum;
  out.accounting = value_oracle.accounting() - before;
  return out;
}

}  // namespace noisy_select
