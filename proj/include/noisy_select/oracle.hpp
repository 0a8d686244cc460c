#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <span>
#include <string>
#include <vector>

#include "noisy_select/adversary.hpp"
#include "noisy_select/errors.hpp"
#include "noisy_select/instance.hpp"
#include "noisy_select/mode_law.hpp"
#include "noisy_select/query.hpp"
#include "noisy_select/rng.hpp"

namespace noisy_select {

/// Exact probability num/den, kept over its natural denominator (not reduced).
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend constexpr bool operator==(const Fraction&, const Fraction&) = default;
};

constexpr std::uint64_t binomial(std::uint32_t n, std::uint32_t k) noexcept {
  std::uint64_t c = 1;
  for (std::uint32_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

constexpr std::uint64_t pow3(std::uint32_t e) noexcept {
  std::uint64_t p = 1;
  for (std::uint32_t i = 0; i < e; ++i) p *= 3;
  return p;
}

/// Probability that a majority of `repeats` answers lie when each lies with probability 1/3
/// (odd `repeats` <= 40), as an exact fraction over 3^repeats.
constexpr Fraction majority_error(std::uint32_t repeats) noexcept {
  std::uint64_t num = 0;
  for (std::uint32_t lies = repeats / 2 + 1; lies <= repeats; ++lies)
    num += binomial(repeats, lies) << (repeats - lies);
  return {num, pow3(repeats)};
}

namespace detail {

constexpr std::uint32_t kMaxTabledGroup = 40;

// lie_at_least[g][j] = floor(2^64 * P(at least j lies among g coins)), j = 1..g.
struct LieTable {
  std::array<std::array<std::uint64_t, kMaxTabledGroup + 1>, kMaxTabledGroup + 1> at_least{};
  constexpr LieTable() {
    for (std::uint32_t g = 1; g <= kMaxTabledGroup; ++g) {
      unsigned __int128 tail = 0;
      for (std::uint32_t j = g; j >= 1; --j) {
        tail += static_cast<unsigned __int128>(binomial(g, j)) << (g - j);
        at_least[g][j] = static_cast<std::uint64_t>((tail << 64) / pow3(g));
      }
    }
  }
};

inline const LieTable& lie_table() {
  static const LieTable table;
  return table;
}

}  // namespace detail

enum class Model : std::uint8_t { Value, Comparison };

/// Anything that answers batches of requests. Every non-empty call to `ask` is one round.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::vector<Reply> ask(std::span<const Request> batch) = 0;
  virtual Accounting accounting() const = 0;
  virtual std::size_t size() const = 0;
};

/// One answer of the plain per-query interface.
struct Answer {
  bool yes = false;    // compare queries
  double value = 0.0;  // value queries
};

/// Seeded noisy oracle over a hidden instance. Each answer is the truth with probability 2/3
/// and the adversary's choice otherwise; coins come from (seed, global query index) only.
class OracleSession final : public Oracle {
 public:
  OracleSession(std::shared_ptr<const Instance> instance, Adversary adversary, std::uint64_t seed, Model model)
      : instance_(std::move(instance)),
        adversary_(std::move(adversary)),
        seed_(seed),
        model_(model),
        coin_key_(derive_key(seed, 1)),
        content_key_(derive_key(seed, 2)),
        history_(instance_->size(), 0),
        pending_(instance_->size(), 0) {}

  OracleSession(const OracleSession&) = delete;
  OracleSession& operator=(const OracleSession&) = delete;

  const Instance& instance() const noexcept { return *instance_; }
  const Adversary& adversary() const noexcept { return adversary_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Model model() const noexcept { return model_; }
  std::size_t size() const noexcept override { return instance_->size(); }
  Accounting accounting() const noexcept override { return counters_; }
  /// Queries so far that involved element x.
  std::uint64_t history(Id x) const { return history_.at(x); }

  /// Answers of one round, produced on demand. Counters, query indices and per-element
  /// history only change on commit(); a round dropped without commit leaves no trace.
  class Round {
   public:
    explicit Round(OracleSession& session) : s_(session), counter_(session.counters_.queries) {}
    Round(const Round&) = delete;
    Round& operator=(const Round&) = delete;
    ~Round() {
      for (Id x : touched_) s_.pending_[x] = 0;
    }

    /// `g` copies of "value(x) >= value(y)?"; returns the number of yes answers.
    std::uint32_t compare_yes(Id x, Id y, std::uint32_t g) {
      if (s_.model_ != Model::Comparison) throw QueryError("compare query sent to a value-model oracle");
      s_.check_id(x);
      s_.check_id(y);
      if (x == y) throw QueryError("self-comparison");
      const auto start = take(x, g);
      charge(y, g);
      return s_.compare_yes(x, y, g, start);
    }

    /// `out.size()` consecutive groups of `g` copies of "value(x) >= value(y)?".
    void compare_groups(Id x, Id y, std::uint32_t g, std::span<std::uint32_t> out) {
      if (s_.model_ != Model::Comparison) throw QueryError("compare query sent to a value-model oracle");
      s_.check_id(x);
      s_.check_id(y);
      if (x == y) throw QueryError("self-comparison");
      if (g == 0) throw QueryError("empty query group");
      const std::uint64_t total = std::uint64_t{g} * out.size();
      charge(x, total);
      charge(y, total);
      const auto start = counter_;
      counter_ += total;
      if (!s_.adversary_.lies()) {
        std::fill(out.begin(), out.end(), s_.instance_->value(x) >= s_.instance_->value(y) ? g : 0U);
        return;
      }
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = s_.compare_yes(x, y, g, start + i * g);
    }

    /// `g` copies of "value of x?"; returns the most frequent answer (ties to the larger value).
    double value_mode(Id x, std::uint32_t g) {
      if (s_.model_ != Model::Value) throw QueryError("value query sent to a comparison-model oracle");
      s_.check_id(x);
      const auto start = take(x, g);
      return s_.value_mode(x, g, start);
    }

    /// `groups` groups of `g` copies of "is the most frequent of `per` answers about x at least
    /// the most frequent of `per` answers about y?"; writes the yes count of each group.
    /// Costs 2 * per * g * groups value queries.
    void mode_compare(Id x, Id y, std::uint32_t g, std::uint32_t per, std::span<std::uint32_t> out) {
      if (s_.model_ != Model::Value) throw QueryError("value query sent to a comparison-model oracle");
      s_.check_id(x);
      s_.check_id(y);
      if (x == y) throw QueryError("self-comparison");
      if (g == 0 || per == 0) throw QueryError("empty query group");
      const std::uint64_t side = std::uint64_t{per} * g * out.size();
      charge(x, side);
      charge(y, side);
      const auto start = counter_;
      counter_ += 2 * side;
      s_.mode_compare(x, y, g, per, start, out);
    }

    std::uint64_t issued() const noexcept { return counter_ - s_.counters_.queries; }

    void commit() {
      const auto n = issued();
      for (Id x : touched_) {
        s_.history_[x] += s_.pending_[x];
        s_.pending_[x] = 0;
      }
      touched_.clear();
      s_.counters_.queries += n;
      if (n > 0) ++s_.counters_.rounds;
    }

   private:
    std::uint64_t take(Id x, std::uint32_t g) {
      if (g == 0) throw QueryError("empty query group");
      charge(x, g);
      const auto start = counter_;
      counter_ += g;
      return start;
    }
    void charge(Id x, std::uint64_t g) {
      if (s_.pending_[x] == 0) touched_.push_back(x);
      s_.pending_[x] += g;
    }

    OracleSession& s_;
    std::uint64_t counter_;
    std::vector<Id> touched_;
  };

  std::vector<Reply> ask(std::span<const Request> batch) override {
    for (const auto& r : batch) validate(r);
    Round round(*this);
    std::vector<Reply> replies(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& r = batch[i];
      const auto g = static_cast<std::uint32_t>(r.group);
      const std::uint64_t groups = r.repeat / r.group;
      if (r.query.kind == QueryKind::Compare) {
        replies[i].yes.resize(groups);
        round.compare_groups(r.query.x, r.query.y, g, replies[i].yes);
      } else {
        replies[i].values.resize(groups);
        for (std::uint64_t j = 0; j < groups; ++j) replies[i].values[j] = round.value_mode(r.query.x, g);
      }
    }
    round.commit();
    return replies;
  }

  /// Plain interface: one answer per query, all in one round.
  std::vector<Answer> answer_batch(std::span<const Query> queries) {
    std::vector<Request> batch;
    batch.reserve(queries.size());
    for (const auto& q : queries) batch.push_back({q, 1, 1});
    const auto replies = ask(batch);
    std::vector<Answer> out(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (queries[i].kind == QueryKind::Compare) out[i].yes = replies[i].yes[0] != 0;
      else out[i].value = replies[i].values[0];
    }
    return out;
  }

 private:
  void check_id(Id x) const {
    if (x >= instance_->size()) throw QueryError("query id out of range");
  }

  void validate(const Request& r) const {
    const auto& q = r.query;
    const bool compare = q.kind == QueryKind::Compare;
    if ((model_ == Model::Value) == compare)
      throw QueryError(compare ? "compare query sent to a value-model oracle" : "value query sent to a comparison-model oracle");
    check_id(q.x);
    if (compare) check_id(q.y);
    if (compare && q.x == q.y) throw QueryError("self-comparison");
    if (r.repeat == 0 || r.group == 0 || r.repeat % r.group != 0) throw QueryError("repeat must be a positive multiple of group");
    if (r.group > UINT32_MAX) throw QueryError("group too large");
  }

  // Number of lies among the `g` coins with indices start..start+g-1, drawn from the
  // binomial law with one word.
  std::uint32_t lies(std::uint64_t start, std::uint32_t g) {
    const auto word = stream_word(coin_key_, start);
    if (g <= detail::kMaxTabledGroup) {
      const auto& row = detail::lie_table().at_least[g];
      std::uint32_t j = 0;
      while (j < g && word < row[j + 1]) ++j;
      return j;
    }
    auto& cdf = lie_cdf_[g];
    if (cdf.empty()) cdf = detail::binomial_cdf(g, 1.0 / 3.0);
    return detail::sample_cdf(cdf, word);
  }

  // Mode law of x for the current history: either a tabulated law or truth/lie atoms.
  struct ElementLaw {
    const detail::LevelLaw* dense = nullptr;
    std::uint32_t truth = 0;
    std::uint32_t lie = 0;
    double lie_p = 0.0;

    double at_or_below(std::uint32_t level) const {  // P(mode level >= level)
      if (dense) return dense->tail[level];
      return (truth >= level ? 1.0 - lie_p : 0.0) + (lie >= level ? lie_p : 0.0);
    }
  };

  std::optional<ElementLaw> element_law(Id x) {
    const auto& inst = *instance_;
    auto& laws = *laws_;
    ElementLaw law;
    law.truth = law.lie = laws.level_of(inst.value(x));
    if (!adversary_.lies()) return law;
    if (const auto fixed = adversary_.fixed_lie_value(inst, x, history_[x])) {
      law.lie = laws.level_of(*fixed);
      if (law.lie != law.truth) law.lie_p = laws.fixed_lie_wins(law.truth, law.lie);
      return law;
    }
    if (!laws.tabulates_uniform()) return std::nullopt;
    law.dense = &laws.uniform(law.truth);
    return law;
  }

  // P(mode of x >= mode of y).
  double mode_at_least(const ElementLaw& a, const ElementLaw& b) {
    if (a.dense && b.dense) {
      const std::size_t m = laws_->levels();
      if (pair_cache_.empty()) pair_cache_.assign(m * m, -1.0);
      double& q = pair_cache_[a.truth * m + b.truth];
      if (q < 0.0) {
        q = 0.0;
        for (std::uint32_t i = 0; i < m; ++i) q += a.dense->p[i] * b.dense->tail[i];
      }
      return q;
    }
    if (a.dense) {
      double q = 0.0;
      for (std::uint32_t i = 0; i < laws_->levels(); ++i) q += a.dense->p[i] * b.at_or_below(i);
      return q;
    }
    return (1.0 - a.lie_p) * b.at_or_below(a.truth) + (a.lie_p > 0.0 ? a.lie_p * b.at_or_below(a.lie) : 0.0);
  }

  void mode_compare(Id x, Id y, std::uint32_t g, std::uint32_t per, std::uint64_t start, std::span<std::uint32_t> out) {
    const auto& inst = *instance_;
    if (!adversary_.lies()) {
      std::fill(out.begin(), out.end(), inst.value(x) >= inst.value(y) ? g : 0U);
      return;
    }
    const std::uint64_t stride = 2 * std::uint64_t{per} * g;
    if (per <= detail::kMaxTabledGroup) {
      if (!laws_ || laws_->per() != per) {
        laws_ = std::make_unique<detail::ModeLaws>(inst, per);
        pair_cache_.clear();
      }
      const auto lx = element_law(x);
      const auto ly = lx ? element_law(y) : std::nullopt;
      if (lx && ly) {
        const auto cdf = detail::binomial_cdf(g, mode_at_least(*lx, *ly));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::sample_cdf(cdf, stream_word(content_key_, start + i * stride));
        return;
      }
    }
    std::uint64_t at = start;
    for (auto& yes : out) {
      std::uint32_t count = 0;
      for (std::uint32_t j = 0; j < g; ++j) {
        const double mx = value_mode(x, per, at);
        const double my = value_mode(y, per, at + per);
        at += 2 * per;
        count += mx >= my ? 1U : 0U;
      }
      yes = count;
    }
  }

  std::uint32_t compare_yes(Id x, Id y, std::uint32_t g, std::uint64_t start) {
    const auto& inst = *instance_;
    const bool truth = inst.value(x) >= inst.value(y);
    if (!adversary_.lies()) return truth ? g : 0U;
    const auto hist = history_[x];
    std::optional<bool> fixed = adversary_.fixed_compare_lie(truth);
    if (!fixed)
      if (const auto lie = adversary_.fixed_lie_value(inst, x, hist)) fixed = *lie >= inst.value(y);
    if (fixed) {
      const auto l = lies(start, g);
      return (truth ? g - l : 0U) + (*fixed ? l : 0U);
    }
    std::uint32_t yes = 0;
    for (std::uint32_t i = 0; i < g; ++i) {
      const bool lie = stream_word(coin_key_, start + i) < kLieBelow;
      yes += (lie ? adversary_.lie_compare(inst, x, y, truth, stream_word(content_key_, start + i), hist) : truth) ? 1U : 0U;
    }
    return yes;
  }

  double value_mode(Id x, std::uint32_t g, std::uint64_t start) {
    const auto& inst = *instance_;
    const double truth = inst.value(x);
    if (!adversary_.lies()) return truth;
    const auto l = lies(start, g);
    if (2 * l < g) return truth;  // the truth outnumbers all lies together
    const auto hist = history_[x];
    const std::uint32_t t = g - l;
    if (const auto fixed = adversary_.fixed_lie_value(inst, x, hist)) {
      if (*fixed == truth) return truth;
      return t > l ? truth : l > t ? *fixed : std::max(truth, *fixed);
    }
    scratch_.resize(l);
    for (std::uint32_t i = 0; i < l; ++i) scratch_[i] = adversary_.lie_value(inst, x, stream_word(content_key_, start + i), hist);
    std::sort(scratch_.begin(), scratch_.end(), std::greater<>());
    double best = truth;
    std::uint32_t best_count = t;
    for (std::size_t i = 0; i < scratch_.size();) {
      std::size_t j = i;
      while (j < scratch_.size() && scratch_[j] == scratch_[i]) ++j;
      const auto c = static_cast<std::uint32_t>(j - i) + (scratch_[i] == truth ? t : 0U);
      if (c > best_count || (c == best_count && scratch_[i] > best)) {
        best = scratch_[i];
        best_count = c;
      }
      i = j;
    }
    return best;
  }

  std::shared_ptr<const Instance> instance_;
  Adversary adversary_;
  std::uint64_t seed_;
  Model model_;
  std::uint64_t coin_key_;
  std::uint64_t content_key_;
  std::vector<std::uint64_t> history_;
  std::vector<std::uint64_t> pending_;
  std::vector<double> scratch_;
  std::unordered_map<std::uint32_t, std::vector<double>> lie_cdf_;
  std::unique_ptr<detail::ModeLaws> laws_;
  std::vector<double> pair_cache_;
  Accounting counters_;
};

enum class Comparison : std::uint8_t { XGreater, YGreater, Equal };

/// Decodes the two majorities of a three-outcome comparison.
constexpr Comparison decode_three_outcome(bool x_ge_y, bool y_ge_x) noexcept {
  if (x_ge_y == y_ge_x) return Comparison::Equal;
  return x_ge_y ? Comparison::XGreater : Comparison::YGreater;
}

/// Requests for `count` three-outcome comparisons of x against y: two requests with one
/// group of `repeats` answers per comparison.
inline std::array<Request, 2> three_outcome_requests(Id x, Id y, std::uint32_t repeats, std::uint64_t count = 1) {
  return {Request{Query::compare(x, y), repeats * count, repeats}, Request{Query::compare(y, x), repeats * count, repeats}};
}

inline Comparison three_outcome_compare(Oracle& oracle, Id x, Id y, std::uint32_t repeats) {
  if (repeats % 2 == 0) throw ParameterError("three_outcome_compare: repeats must be odd");
  const auto req = three_outcome_requests(x, y, repeats);
  const auto rep = oracle.ask(req);
  return decode_three_outcome(2 * rep[0].yes[0] > repeats, 2 * rep[1].yes[0] > repeats);
}

/// Single-direction comparison for instances promised to be tie-free.
inline Comparison distinct_compare(Oracle& oracle, Id x, Id y, std::uint32_t repeats) {
  if (repeats % 2 == 0) throw ParameterError("distinct_compare: repeats must be odd");
  const Request req{Query::compare(x, y), repeats, repeats};
  const auto rep = oracle.ask(std::span(&req, 1));
  return 2 * rep[0].yes[0] > repeats ? Comparison::XGreater : Comparison::YGreater;
}

}  // namespace noisy_select
