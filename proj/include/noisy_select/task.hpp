#pragma once

#include <coroutine>
#include <cstdint>
#include <exception>
#include <iterator>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "noisy_select/oracle.hpp"
#include "noisy_select/query.hpp"

namespace noisy_select {

// Algorithms are lazy coroutines. A coroutine asks the oracle by `co_await submit(batch)`; the
// batch is parked on the strand of the task tree it belongs to and whoever drives that strand
// (the root driver, or a parent combining several children into one round) answers it.

struct Strand {
  std::vector<Request> pending;
  std::vector<Reply> replies;
  std::coroutine_handle<> waiting;
};

template <class T>
class Task;

namespace detail {

struct PromiseBase {
  Strand* strand = nullptr;
  std::coroutine_handle<> continuation;
  std::exception_ptr error;

  std::suspend_always initial_suspend() noexcept { return {}; }

  struct FinalAwaiter {
    bool await_ready() noexcept { return false; }
    template <class P>
    std::coroutine_handle<> await_suspend(std::coroutine_handle<P> h) noexcept {
      auto next = h.promise().continuation;
      return next ? next : std::noop_coroutine();
    }
    void await_resume() noexcept {}
  };
  FinalAwaiter final_suspend() noexcept { return {}; }
  void unhandled_exception() noexcept { error = std::current_exception(); }
};

}  // namespace detail

template <class T>
class [[nodiscard]] Task {
 public:
  struct promise_type : detail::PromiseBase {
    std::optional<T> value;
    Task get_return_object() { return Task(std::coroutine_handle<promise_type>::from_promise(*this)); }
    template <class U>
    void return_value(U&& v) {
      value.emplace(std::forward<U>(v));
    }
  };
  using Handle = std::coroutine_handle<promise_type>;

  Task() = default;
  Task(Task&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  Task& operator=(Task&& other) noexcept {
    if (this != &other) {
      reset();
      handle_ = std::exchange(other.handle_, {});
    }
    return *this;
  }
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;
  ~Task() { reset(); }

  Handle handle() const noexcept { return handle_; }
  bool done() const noexcept { return handle_.done(); }

  T take() {
    auto& p = handle_.promise();
    if (p.error) std::rethrow_exception(p.error);
    return std::move(*p.value);
  }

  struct Awaiter {
    Handle child;
    bool await_ready() noexcept { return false; }
    template <class P>
    std::coroutine_handle<> await_suspend(std::coroutine_handle<P> parent) noexcept {
      child.promise().strand = parent.promise().strand;
      child.promise().continuation = parent;
      return child;
    }
    T await_resume() {
      auto& p = child.promise();
      if (p.error) std::rethrow_exception(p.error);
      return std::move(*p.value);
    }
  };

  /// Runs the child on the parent's strand.
  Awaiter operator co_await() && noexcept { return Awaiter{handle_}; }

 private:
  explicit Task(Handle h) : handle_(h) {}
  void reset() {
    if (handle_) handle_.destroy();
    handle_ = {};
  }
  Handle handle_;
};

/// Awaiter that submits `batch` (left empty afterwards); an empty batch completes
/// immediately and costs no round. Holds no owning members, so copies are harmless.
struct Ask {
  std::vector<Request>* batch;
  Strand* strand = nullptr;

  bool await_ready() const noexcept { return batch->empty(); }
  template <class P>
  void await_suspend(std::coroutine_handle<P> h) {
    strand = h.promise().strand;
    strand->pending.swap(*batch);
    batch->clear();
    strand->waiting = h;
  }
  std::vector<Reply> await_resume() {
    if (strand == nullptr) return {};
    return std::move(strand->replies);
  }
};

inline Ask submit(std::vector<Request>& batch) noexcept { return Ask{&batch}; }

namespace detail {

// A task started on its own strand, stepped by a combinator.
template <class T>
struct Lane {
  Task<T> task;
  Strand strand;

  explicit Lane(Task<T> t) : task(std::move(t)) { task.handle().promise().strand = &strand; }
  void start() { task.handle().resume(); }
  bool done() const { return task.done(); }
  void resume_with(std::vector<Reply> replies) {
    strand.replies = std::move(replies);
    auto h = std::exchange(strand.waiting, {});
    h.resume();
  }
};

}  // namespace detail

/// Runs all tasks in lock-step: their batches of the same step are merged into one round.
template <class T>
Task<std::vector<T>> when_all(std::vector<Task<T>> tasks) {
  std::vector<std::unique_ptr<detail::Lane<T>>> lanes;
  lanes.reserve(tasks.size());
  for (auto& t : tasks) lanes.push_back(std::make_unique<detail::Lane<T>>(std::move(t)));
  for (auto& lane : lanes) lane->start();
  for (;;) {
    std::vector<Request> merged;
    std::vector<std::size_t> owners;
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      if (lanes[i]->done()) continue;
      for (auto& r : lanes[i]->strand.pending) {
        merged.push_back(r);
        owners.push_back(i);
      }
    }
    if (merged.empty()) break;
    auto replies = co_await submit(merged);
    std::vector<std::vector<Reply>> split(lanes.size());
    for (std::size_t j = 0; j < replies.size(); ++j) split[owners[j]].push_back(std::move(replies[j]));
    for (std::size_t i = 0; i < lanes.size(); ++i)
      if (!lanes[i]->done()) lanes[i]->resume_with(std::move(split[i]));
  }
  std::vector<T> out;
  out.reserve(lanes.size());
  for (auto& lane : lanes) out.push_back(lane->task.take());
  co_return out;
}

/// Pair of tasks run side by side under a shared budget.
struct RaceBudget {
  std::uint64_t max_queries = UINT64_MAX;
  std::uint64_t max_rounds = UINT64_MAX;
  std::uint64_t compare_cost = 1;  // queries charged per compare answer, e.g. 18 through the value adapter
};

template <class T>
struct RaceResult {
  std::optional<T> value;  // empty when the budget ran out first
  int winner = -1;         // 0 or 1
  Accounting spent;
};

/// Steps `a` and `b` together, one merged round at a time, and returns the first to finish
/// (`a` on a tie). Stops before any round that would exceed the budget.
template <class T>
Task<RaceResult<T>> race(Task<T> a, Task<T> b, RaceBudget budget) {
  detail::Lane<T> la(std::move(a));
  detail::Lane<T> lb(std::move(b));
  RaceResult<T> result;
  la.start();
  lb.start();
  for (;;) {
    if (la.done()) {
      result.value = la.task.take();
      result.winner = 0;
      break;
    }
    if (lb.done()) {
      result.value = lb.task.take();
      result.winner = 1;
      break;
    }
    std::vector<Request> merged = la.strand.pending;
    merged.insert(merged.end(), lb.strand.pending.begin(), lb.strand.pending.end());
    std::uint64_t cost = 0;
    for (const auto& r : merged) cost += r.repeat * (r.query.kind == QueryKind::Compare ? budget.compare_cost : 1);
    if (result.spent.queries + cost > budget.max_queries || result.spent.rounds + 1 > budget.max_rounds) break;
    const auto split_at = la.strand.pending.size();
    auto replies = co_await submit(merged);
    result.spent.queries += cost;
    result.spent.rounds += 1;
    std::vector<Reply> ra(std::make_move_iterator(replies.begin()),
                          std::make_move_iterator(replies.begin() + static_cast<std::ptrdiff_t>(split_at)));
    std::vector<Reply> rb(std::make_move_iterator(replies.begin() + static_cast<std::ptrdiff_t>(split_at)),
                          std::make_move_iterator(replies.end()));
    la.resume_with(std::move(ra));
    lb.resume_with(std::move(rb));
  }
  co_return result;
}

/// Runs a task to completion against an oracle.
template <class T>
T drive(Oracle& oracle, Task<T> task) {
  Strand strand;
  task.handle().promise().strand = &strand;
  task.handle().resume();
  while (!task.done()) {
    strand.replies = oracle.ask(strand.pending);
    strand.pending.clear();
    std::exchange(strand.waiting, {}).resume();
  }
  return task.take();
}

}  // namespace noisy_select
