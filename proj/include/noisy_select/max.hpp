#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "noisy_select/compare.hpp"
#include "noisy_select/context.hpp"
#include "noisy_select/errors.hpp"
#include "noisy_select/task.hpp"
#include "noisy_select/tower.hpp"

namespace noisy_select {

namespace detail {

inline void check_delta(double delta, const char* who) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError(std::string(who) + ": delta must lie in (0, 1]");
}

inline std::uint64_t ceil_count(double x) { return x <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(x)); }

}  // namespace detail

/// All pairs compared in one round; returns an element that is at least as good as every
/// other in at least half of their comparisons, or FAIL.
inline Task<MaybeId> one_round_max_task(Context& ctx, IdSet xs, double delta, Direction dir = Direction::Max) {
  detail::check_delta(delta, "one_round_max");
  if (xs.empty()) throw ParameterError("one_round_max: empty set");
  if (xs.size() == 1) co_return xs.front();
  const auto& c = ctx.constants;
  const std::size_t s = xs.size();
  const std::uint64_t m =
      detail::ceil_count(c.one_round_c * std::log2(static_cast<double>(s) / delta)) + 1;
  std::vector<Request> batch;
  batch.reserve(s * (s - 1));
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j) add_duels(batch, xs[i], xs[j], m, c.tie_repeats, dir);
  const auto replies = co_await submit(batch);

  std::vector<bool> passes(s, true);
  std::vector<std::uint64_t> score(s, 0);  // wins plus ties over all opponents
  std::size_t k = 0;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = i + 1; j < s; ++j, k += 2) {
      const auto t = tally_duels(replies[k], replies[k + 1], c.tie_repeats);
      if (2 * (t.x_wins + t.ties) < m) passes[i] = false;
      if (2 * (t.y_wins + t.ties) < m) passes[j] = false;
      score[i] += t.x_wins + t.ties;
      score[j] += t.y_wins + t.ties;
    }
  MaybeId best;
  std::uint64_t best_score = 0;
  for (std::size_t i = 0; i < s; ++i) {
    if (!passes[i]) continue;
    if (!best || score[i] > best_score || (score[i] == best_score && xs[i] < *best)) {
      best = xs[i];
      best_score = score[i];
    }
  }
  co_return best;
}

/// Maximum (or minimum) of xs in at most r rounds with failure probability delta.
inline Task<MaybeId> parallel_max_task(Context& ctx, IdSet xs, int r, double delta, Direction dir = Direction::Max) {
  detail::check_delta(delta, "parallel_max");
  if (xs.empty()) throw ParameterError("parallel_max: empty set");
  const auto& c = ctx.constants;
  const std::size_t n = xs.size();
  if (n < c.min_parallel_n) co_return co_await one_round_max_task(ctx, std::move(xs), delta, dir);
  if (r < 5) throw ParameterError("parallel_max: need r >= 5");
  const double nd = static_cast<double>(n);
  const double b = solve_base(nd, r);
  const double p = std::cbrt(1.0 / nd);

  auto sample = [&](const IdSet& from) {
    IdSet out;
    for (Id x : from)
      if (flip(ctx.rng, p)) out.push_back(x);
    return out;
  };
  IdSet ys = sample(xs);
  if (ys.empty()) ys = sample(xs);
  if (ys.empty() && nd <= std::sqrt(nd)) co_return co_await one_round_max_task(ctx, std::move(xs), delta, dir);
  while (ys.empty()) ys = sample(xs);
  const IdSet zs = sample(ys);

  Id z1 = ys.front();
  if (!zs.empty()) {
    const auto z = co_await one_round_max_task(ctx, zs, delta / 5, dir);
    if (!z) co_return std::nullopt;
    z1 = *z;
  }

  // Y* = {z1} and the elements of Y that beat z1 strictly in at least half of their comparisons.
  IdSet y_star{z1};
  {
    const std::uint64_t cmp = detail::ceil_count(c.y_compare_c * std::log(nd / delta)) + 1;
    IdSet rest;
    std::vector<Request> batch;
    for (Id y : ys)
      if (y != z1) {
        rest.push_back(y);
        add_duels(batch, y, z1, cmp, c.tie_repeats, dir);
      }
    const auto replies = co_await submit(batch);
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (2 * tally_duels(replies[2 * i], replies[2 * i + 1], c.tie_repeats).x_wins >= cmp) y_star.push_back(rest[i]);
  }
  const auto y1 = co_await one_round_max_task(ctx, y_star, delta / 5, dir);
  if (!y1) co_return std::nullopt;

  IdSet alive;
  alive.reserve(n);
  for (Id x : xs)
    if (x != *y1) alive.push_back(x);
  const double log_term = std::log(16.0 * b / delta);
  const double floor_size = 2.0 * std::cbrt(nd) * log_term * log_term;
  for (int t = 1; t <= r - 4 && !alive.empty(); ++t) {
    const double two_t = std::ldexp(1.0, t);
    const std::uint64_t nt =
        detail::ceil_count(t * c.loop_c * nd / (two_t * static_cast<double>(alive.size())) * log_term);
    std::vector<Request> batch;
    batch.reserve(2 * alive.size());
    for (Id x : alive) add_duels(batch, x, *y1, nt, c.tie_repeats, dir);
    const auto replies = co_await submit(batch);
    IdSet next;
    for (std::size_t i = 0; i < alive.size(); ++i)
      if (2 * tally_duels(replies[2 * i], replies[2 * i + 1], c.tie_repeats).x_wins >= nt) next.push_back(alive[i]);
    alive = std::move(next);
    const auto z = zeta(b, delta, t, c.tower_cap);
    const double limit = std::max(nd / (two_t * z.value), floor_size);
    if (static_cast<double>(alive.size()) > limit) co_return std::nullopt;
  }
  alive.push_back(*y1);
  co_return co_await one_round_max_task(ctx, std::move(alive), delta / 5, dir);
}

inline Task<MaybeId> parallel_min_task(Context& ctx, IdSet xs, int r, double delta) {
  return parallel_max_task(ctx, std::move(xs), r, delta, Direction::Min);
}

namespace detail {

inline Outcome run_single(Oracle& oracle, Task<MaybeId> task) {
  const auto before = oracle.accounting();
  const auto id = drive(oracle, std::move(task));
  Outcome out;
  if (id) out.ids = IdSet{*id};
  out.accounting = oracle.accounting() - before;
  return out;
}

}  // namespace detail

inline Outcome one_round_max(Oracle& oracle, Context& ctx, IdSet xs, double delta) {
  return detail::run_single(oracle, one_round_max_task(ctx, std::move(xs), delta));
}

inline Outcome parallel_max(Oracle& oracle, Context& ctx, IdSet xs, int r, double delta) {
  return detail::run_single(oracle, parallel_max_task(ctx, std::move(xs), r, delta));
}

inline Outcome parallel_min(Oracle& oracle, Context& ctx, IdSet xs, int r, double delta) {
  return detail::run_single(oracle, parallel_min_task(ctx, std::move(xs), r, delta));
}

}  // namespace noisy_select
