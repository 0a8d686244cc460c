#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noisy_select/errors.hpp"
#include "noisy_select/instance.hpp"
#include "noisy_select/rng.hpp"

namespace noisy_select {

enum class AdversaryKind : std::uint8_t { Truthful, UniformLie, StickyLie, RankOneLie, BucketLie };

/// Name plus optional parameters, as accepted on the command line.
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::UniformLie;
  std::optional<std::size_t> bucket_size;      // BucketLie: default ceil(sqrt(n))
  std::optional<double> bucket_below;          // BucketLie: only values < this form buckets
  std::uint64_t phase_one_queries = std::numeric_limits<std::uint64_t>::max();
};

inline std::string_view adversary_name(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::Truthful: return "truthful";
    case AdversaryKind::UniformLie: return "uniform";
    case AdversaryKind::StickyLie: return "sticky";
    case AdversaryKind::RankOneLie: return "rank1";
    case AdversaryKind::BucketLie: return "bucket";
  }
  return "?";
}

inline AdversaryKind parse_adversary(std::string_view name) {
  for (auto k : {AdversaryKind::Truthful, AdversaryKind::UniformLie, AdversaryKind::StickyLie,
                 AdversaryKind::RankOneLie, AdversaryKind::BucketLie})
    if (adversary_name(k) == name) return k;
  throw ParameterError("unknown adversary '" + std::string(name) + "'");
}

/// Groups of equal-valued elements that the bucket liar hides other elements in.
struct BucketPartition {
  std::vector<double> bucket_value;  // z_j
  std::vector<std::int32_t> member;  // bucket of a member element, -1 otherwise
  std::vector<std::int32_t> target;  // bucket a non-member lies towards, -1 for members

  /// Equal-valued groups are taken by decreasing size and cut into full chunks of
  /// `bucket_size` until the buckets hold at least 4n/10 elements. Every remaining
  /// element is assigned a uniformly random bucket from `seed`.
  static BucketPartition build(const Instance& instance, std::size_t bucket_size,
                               std::optional<double> below, std::uint64_t seed) {
    if (bucket_size == 0) throw ParameterError("bucket liar: bucket size must be positive");
    const std::size_t n = instance.size();
    std::map<double, std::vector<Id>> groups;
    for (Id i = 0; i < n; ++i) {
      const double v = instance.value(i);
      if (!below || v < *below) groups[v].push_back(i);
    }
    std::vector<std::pair<double, std::vector<Id>>> ordered(groups.begin(), groups.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
      return a.first > b.first;
    });
    BucketPartition p;
    p.member.assign(n, -1);
    p.target.assign(n, -1);
    std::size_t used = 0;
    const double wanted = 0.4 * static_cast<double>(n);
    for (const auto& [value, ids] : ordered) {
      for (std::size_t start = 0; start + bucket_size <= ids.size(); start += bucket_size) {
        if (static_cast<double>(used) >= wanted) break;
        const auto j = static_cast<std::int32_t>(p.bucket_value.size());
        p.bucket_value.push_back(value);
        for (std::size_t t = start; t < start + bucket_size; ++t) p.member[ids[t]] = j;
        used += bucket_size;
      }
    }
    if (!p.bucket_value.empty()) {
      const auto key = derive_key(seed, 0xb0c4e7ULL);
      for (Id i = 0; i < n; ++i)
        if (p.member[i] < 0)
          p.target[i] = static_cast<std::int32_t>(bounded(stream_word(key, i), p.bucket_value.size()));
    }
    return p;
  }
};

/// Rule for the answer given on a lie. The lie event itself (probability 1/3) is drawn by the session.
class Adversary {
 public:
  Adversary() = default;

  static Adversary truthful() { return Adversary(AdversaryKind::Truthful); }
  static Adversary uniform() { return Adversary(AdversaryKind::UniformLie); }
  static Adversary rank_one() { return Adversary(AdversaryKind::RankOneLie); }
  static Adversary sticky(std::uint64_t seed) {
    Adversary a(AdversaryKind::StickyLie);
    a.sticky_key_ = derive_key(seed, 0x57c4ULL);
    return a;
  }
  static Adversary bucket(BucketPartition partition,
                          std::uint64_t phase_one_queries = std::numeric_limits<std::uint64_t>::max()) {
    Adversary a(AdversaryKind::BucketLie);
    a.buckets_ = std::make_shared<const BucketPartition>(std::move(partition));
    a.phase_one_ = phase_one_queries;
    return a;
  }

  static Adversary make(const AdversarySpec& spec, const Instance& instance, std::uint64_t seed) {
    switch (spec.kind) {
      case AdversaryKind::Truthful: return truthful();
      case AdversaryKind::UniformLie: return uniform();
      case AdversaryKind::StickyLie: return sticky(seed);
      case AdversaryKind::RankOneLie: return rank_one();
      case AdversaryKind::BucketLie: {
        const auto size = spec.bucket_size.value_or(
            static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(instance.size())))));
        return bucket(BucketPartition::build(instance, size, spec.bucket_below, seed), spec.phase_one_queries);
      }
    }
    throw ParameterError("unknown adversary kind");
  }

  AdversaryKind kind() const noexcept { return kind_; }
  bool lies() const noexcept { return kind_ != AdversaryKind::Truthful; }
  /// True when lies depend on how often the element has been queried.
  bool uses_history() const noexcept { return kind_ == AdversaryKind::BucketLie; }
  const BucketPartition* buckets() const noexcept { return buckets_.get(); }

  /// Value reported for `x` on a lie. `word` is fresh per-query randomness and
  /// `history` the number of earlier queries about x.
  double lie_value(const Instance& inst, Id x, std::uint64_t word, std::uint64_t history) const {
    const double truth = inst.value(x);
    switch (kind_) {
      case AdversaryKind::Truthful: return truth;
      case AdversaryKind::UniformLie: return other_value(inst, truth, word);
      case AdversaryKind::StickyLie: return other_value(inst, truth, stream_word(sticky_key_, x));
      case AdversaryKind::RankOneLie: return inst.max_value();
      case AdversaryKind::BucketLie: {
        if (history >= phase_one_ || buckets_->bucket_value.empty()) return other_value(inst, truth, word);
        const auto t = buckets_->target[x];
        return t < 0 ? truth : buckets_->bucket_value[static_cast<std::size_t>(t)];
      }
    }
    return truth;
  }

  /// Answer to "value(x) >= value(y)?" on a lie. Value-substituting liars answer as if
  /// x held its lie value; the others flip the bit.
  bool lie_compare(const Instance& inst, Id x, Id y, bool truth, std::uint64_t word,
                   std::uint64_t history) const {
    switch (kind_) {
      case AdversaryKind::Truthful: return truth;
      case AdversaryKind::UniformLie:
      case AdversaryKind::StickyLie: return !truth;
      case AdversaryKind::RankOneLie: return true;
      case AdversaryKind::BucketLie: return lie_value(inst, x, word, history) >= inst.value(y);
    }
    return truth;
  }

  /// The lie value for x when it does not depend on per-query randomness.
  std::optional<double> fixed_lie_value(const Instance& inst, Id x, std::uint64_t history) const {
    switch (kind_) {
      case AdversaryKind::StickyLie: return other_value(inst, inst.value(x), stream_word(sticky_key_, x));
      case AdversaryKind::RankOneLie: return inst.max_value();
      case AdversaryKind::BucketLie:
        if (history >= phase_one_ || buckets_->bucket_value.empty()) return std::nullopt;
        return lie_value(inst, x, 0, history);
      default: return std::nullopt;
    }
  }

  /// For adversaries whose compare lie does not depend on the query: the lie answer.
  std::optional<bool> fixed_compare_lie(bool truth) const {
    switch (kind_) {
      case AdversaryKind::Truthful: return truth;
      case AdversaryKind::UniformLie:
      case AdversaryKind::StickyLie: return !truth;
      case AdversaryKind::RankOneLie: return true;
      case AdversaryKind::BucketLie: return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  explicit Adversary(AdversaryKind kind) : kind_(kind) {}

  // Uniform draw from the value multiset with every copy of `truth` removed.
  static double other_value(const Instance& inst, double truth, std::uint64_t word) {
    const auto& desc = inst.descending();
    const auto [lo, hi] = std::equal_range(desc.begin(), desc.end(), truth, std::greater<>());
    const auto before = static_cast<std::uint64_t>(lo - desc.begin());
    const auto equal = static_cast<std::uint64_t>(hi - lo);
    const auto others = desc.size() - equal;
    if (others == 0) return truth;
    const auto j = bounded(word, others);
    return desc[j < before ? j : j + equal];
  }

  AdversaryKind kind_ = AdversaryKind::Truthful;
  std::uint64_t sticky_key_ = 0;
  std::shared_ptr<const BucketPartition> buckets_;
  std::uint64_t phase_one_ = std::numeric_limits<std::uint64_t>::max();
};

}  // namespace noisy_select
