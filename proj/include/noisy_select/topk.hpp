#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "noisy_select/compare.hpp"
#include "noisy_select/context.hpp"
#include "noisy_select/max.hpp"
#include "noisy_select/task.hpp"
#include "noisy_select/tower.hpp"

namespace noisy_select {

namespace detail {

inline IdSet sorted(IdSet ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline IdSet without(const IdSet& xs, const IdSet& drop) {
  const auto gone = sorted(drop);
  IdSet out;
  for (Id x : xs)
    if (!std::binary_search(gone.begin(), gone.end(), x)) out.push_back(x);
  return out;
}

/// Compares every pair `m` times in one round ("x >= y?", majority decides) and returns the
/// k elements with the most pairwise wins, ties by smaller id.
inline Task<IdSet> rank_by_wins_task(IdSet xs, std::uint64_t m, std::size_t k) {
  const std::size_t s = xs.size();
  std::vector<Request> batch;
  batch.reserve(s * (s - 1) / 2);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j) batch.push_back({Query::compare(xs[i], xs[j]), m, m});
  const auto replies = co_await submit(batch);
  std::vector<std::uint64_t> wins(s, 0);
  std::size_t at = 0;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j, ++at) ++wins[2 * replies[at].yes[0] > m ? i : j];
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return wins[a] != wins[b] ? wins[a] > wins[b] : xs[a] < xs[b];
  });
  IdSet out;
  for (std::size_t i = 0; i < std::min(k, s); ++i) out.push_back(xs[order[i]]);
  co_return sorted(std::move(out));
}

inline void check_k(std::size_t k, std::size_t n, const char* who) {
  if (k == 0 || k > n) throw ParameterError(std::string(who) + ": need 1 <= k <= |X|");
}

}  // namespace detail

/// Quadratic stand-in for a constant-round sorting network: every pair compared
/// ceil(24 log2(|X|/delta)) times in one round, ranked by wins.
inline Task<MaybeIds> fallback_sort_topk_task(Context& ctx, IdSet xs, std::size_t k, double delta) {
  detail::check_delta(delta, "fallback_sort_topk");
  detail::check_k(k, xs.size(), "fallback_sort_topk");
  const auto m = detail::ceil_count(ctx.constants.fallback_c * std::log2(static_cast<double>(xs.size()) / delta));
  co_return co_await detail::rank_by_wins_task(std::move(xs), std::max<std::uint64_t>(m, 1), k);
}

/// Top-k in at most r + 1 rounds: maxima of 4k^4/delta random parts, then all-pairs ranking.
inline Task<MaybeIds> top_k_task(Context& ctx, IdSet xs, std::size_t k, int r, double delta) {
  detail::check_delta(delta, "top_k");
  detail::check_k(k, xs.size(), "top_k");
  const auto& c = ctx.constants;
  const double n = static_cast<double>(xs.size());
  const double kd = static_cast<double>(k);
  if (kd / delta > std::pow(n, 1.0 / c.topk_fallback_root) || 2 * k > xs.size())
    co_return co_await fallback_sort_topk_task(ctx, std::move(xs), k, delta);

  const double want = std::ceil(c.topk_partition_c * std::pow(kd, 4) / delta);
  const auto parts = detail::random_partition(xs, static_cast<std::size_t>(std::min(want, n)), ctx.rng);
  const double part_delta = delta * delta / (4.0 * std::pow(kd, 7));
  std::vector<Task<MaybeId>> maxima;
  for (const auto& part : parts) maxima.push_back(parallel_max_task(ctx, part, r, part_delta));
  const auto ys = co_await when_all(std::move(maxima));
  IdSet heads;
  for (const auto& y : ys) {
    if (!y) co_return std::nullopt;
    heads.push_back(*y);
  }
  const auto m = detail::ceil_count(c.topk_final_c * std::log2(kd / delta));
  co_return co_await detail::rank_by_wins_task(std::move(heads), std::max<std::uint64_t>(m, 1), k);
}

/// k elements among the top ceil((1 + min(1, gamma)) k).
inline Task<MaybeIds> approx_top_k_task(Context& ctx, IdSet xs, std::size_t k, int r, double gamma, double delta) {
  detail::check_delta(delta, "approx_top_k");
  detail::check_k(k, xs.size(), "approx_top_k");
  if (!(gamma > 0.0)) throw ParameterError("approx_top_k: gamma must be positive");
  const double kd = static_cast<double>(k);
  if (gamma < 1.0 / kd) co_return co_await top_k_task(ctx, std::move(xs), k, r, delta);
  const auto& c = ctx.constants;
  const double g = std::min(1.0, gamma);
  const double want = std::ceil(c.approx_parts_c * kd * (1 + g) * (1 + g) * std::log2(1.0 / delta) / g);
  const auto count = static_cast<std::size_t>(std::clamp(want, kd, static_cast<double>(xs.size())));
  const auto parts = detail::random_partition(xs, count, ctx.rng);
  const double part_delta = g * delta / (c.approx_error_c * (1 + g / 2));
  std::vector<Task<MaybeId>> maxima;
  for (const auto& part : parts) maxima.push_back(parallel_max_task(ctx, part, r / 2, part_delta));
  const auto ys = co_await when_all(std::move(maxima));
  IdSet heads;
  for (const auto& y : ys) {
    if (!y) co_return std::nullopt;
    heads.push_back(*y);
  }
  co_return co_await top_k_task(ctx, std::move(heads), k, r / 2, delta / 6);
}

/// Top-k given the counts lambda (values above v_k) and kappa (values equal to v_k).
inline Task<MaybeIds> parameterized_top_k_task(Context& ctx, IdSet xs, std::size_t k, std::size_t lambda,
                                               std::size_t kappa, int r, double delta) {
  detail::check_delta(delta, "parameterized_top_k");
  detail::check_k(k, xs.size(), "parameterized_top_k");
  if (lambda >= k) co_return co_await top_k_task(ctx, std::move(xs), k, r / 2, delta / 2);
  if (lambda + kappa < k) throw ParameterError("parameterized_top_k: need lambda + kappa >= k");
  const double kd = static_cast<double>(k);
  const double gamma = static_cast<double>(kappa + lambda - k) / static_cast<double>(k - lambda);
  if (gamma < 1.0 / kd || kd * std::log2(kd) >= static_cast<double>(xs.size()))
    co_return co_await top_k_task(ctx, std::move(xs), k, r, delta);
  IdSet head;
  if (lambda > 0) {
    auto s1 = co_await top_k_task(ctx, xs, lambda, r / 2, delta / 2);
    if (!s1) co_return std::nullopt;
    head = std::move(*s1);
  }
  auto s2 = co_await approx_top_k_task(ctx, detail::without(xs, head), k - lambda, r / 2, gamma, delta / 2);
  if (!s2) co_return std::nullopt;
  head.insert(head.end(), s2->begin(), s2->end());
  co_return detail::sorted(std::move(head));
}

struct ObliviousResult {
  MaybeIds ids;
  int iterations = 0;  // guesses tried
};

/// Top-k without knowing lambda and kappa: doubly exponential budget guesses, each
/// checked by comparing the minimum of the output with the maximum of the rest.
inline Task<ObliviousResult> oblivious_top_k_task(Context& ctx, IdSet xs, std::size_t k) {
  detail::check_k(k, xs.size(), "oblivious_top_k");
  const double n = static_cast<double>(xs.size());
  const double kd = static_cast<double>(k);
  const int r = log_star(n, 2.0) + 4;
  ObliviousResult result;
  if (kd * std::log2(kd) >= n) {
    result.ids = co_await top_k_task(ctx, std::move(xs), k, r, 1.0 / 3.0);
    result.iterations = 1;
    co_return result;
  }
  const int last = k < 4 ? 2 : std::max(2, static_cast<int>(std::ceil(std::log2(std::log2(kd)))) + 1);
  for (int i = 2; i <= last; ++i) {
    ++result.iterations;
    const double b = std::ldexp(1.0, 1 << i);
    const auto lambda = static_cast<std::size_t>(std::min(b, kd));
    std::size_t kappa = k > lambda ? k - lambda : 1;
    while (static_cast<double>(kappa) / static_cast<double>(kappa + lambda + 1 - k) > b) ++kappa;
    auto s = co_await parameterized_top_k_task(ctx, xs, k, lambda, kappa, r, 1.0 / (16.0 * b));
    if (!s) continue;
    const auto rest = detail::without(xs, *s);
    if (rest.empty()) {
      result.ids = std::move(s);
      co_return result;
    }
    const double check_delta = 1.0 / (10.0 * static_cast<double>(lambda));
    std::vector<Task<MaybeId>> ends;
    ends.push_back(parallel_min_task(ctx, *s, r, check_delta));
    ends.push_back(parallel_max_task(ctx, rest, r, check_delta));
    const auto found = co_await when_all(std::move(ends));
    if (!found[0] || !found[1]) continue;
    std::vector<Request> batch;
    add_duels(batch, *found[0], *found[1], 1, ctx.constants.tie_repeats, Direction::Max);
    const auto replies = co_await submit(batch);
    if (tally_duels(replies[0], replies[1], ctx.constants.tie_repeats).y_wins == 0) {
      result.ids = std::move(s);
      co_return result;
    }
  }
  co_return result;
}

namespace detail {

inline Outcome run_set(Oracle& oracle, Task<MaybeIds> task) {
  const auto before = oracle.accounting();
  Outcome out;
  out.ids = drive(oracle, std::move(task));
  out.accounting = oracle.accounting() - before;
  return out;
}

}  // namespace detail

inline Outcome fallback_sort_topk(Oracle& oracle, Context& ctx, IdSet xs, std::size_t k, double delta) {
  return detail::run_set(oracle, fallback_sort_topk_task(ctx, std::move(xs), k, delta));
}

inline Outcome top_k(Oracle& oracle, Context& ctx, IdSet xs, std::size_t k, int r, double delta) {
  if (2 * k > xs.size()) throw ParameterError("top_k: need k <= |X|/2");
  return detail::run_set(oracle, top_k_task(ctx, std::move(xs), k, r, delta));
}

inline Outcome approx_top_k(Oracle& oracle, Context& ctx, IdSet xs, std::size_t k, int r, double gamma, double delta) {
  return detail::run_set(oracle, approx_top_k_task(ctx, std::move(xs), k, r, gamma, delta));
}

inline Outcome parameterized_top_k(Oracle& oracle, Context& ctx, IdSet xs, std::size_t k, std::size_t lambda,
                                   std::size_t kappa, int r, double delta) {
  return detail::run_set(oracle, parameterized_top_k_task(ctx, std::move(xs), k, lambda, kappa, r, delta));
}

inline Outcome oblivious_top_k(Oracle& oracle, Context& ctx, IdSet xs, std::size_t k) {
  const auto before = oracle.accounting();
  auto res = drive(oracle, oblivious_top_k_task(ctx, std::move(xs), k));
  Outcome out;
  out.ids = std::move(res.ids);
  out.depth = res.iterations;
  out.accounting = oracle.accounting() - before;
  return out;
}

}  // namespace noisy_select
