#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "noisy_select/context.hpp"
#include "noisy_select/errors.hpp"
#include "noisy_select/instance.hpp"
#include "noisy_select/rng.hpp"

namespace noisy_select {

enum class InstanceKind : std::uint8_t { Distinct, BoundedValues, Profiled, Threshold };

inline std::string_view instance_kind_name(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::Distinct: return "distinct";
    case InstanceKind::BoundedValues: return "bounded";
    case InstanceKind::Profiled: return "profiled";
    case InstanceKind::Threshold: return "threshold";
  }
  return "?";
}

inline InstanceKind parse_instance_kind(std::string_view name) {
  for (auto k : {InstanceKind::Distinct, InstanceKind::BoundedValues, InstanceKind::Profiled, InstanceKind::Threshold})
    if (instance_kind_name(k) == name) return k;
  throw ParameterError("unknown instance kind '" + std::string(name) + "'");
}

struct InstanceSpec {
  InstanceKind kind = InstanceKind::Distinct;
  std::size_t n = 0;
  std::size_t levels = 0;      // bounded, threshold: distinct values (0: ceil(n^(1-epsilon)) / 40)
  double epsilon = 0.5;        // bounded
  std::size_t k = 0;           // profiled
  std::size_t lambda = 0;      // profiled
  std::size_t kappa = 0;       // profiled
  bool tail_distinct = true;   // profiled: values below the pivot all differ
  double v = 0.0;              // threshold
  std::size_t k_v = 0;         // threshold: elements with value >= v
  std::uint64_t seed = 0;

  std::size_t bounded_levels() const {
    return levels > 0 ? levels : static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 1.0 - epsilon)));
  }
  std::size_t threshold_levels() const { return levels > 0 ? levels : 40; }

  /// Comma-free one-line description; equal descriptions generate equal instances.
  std::string describe() const {
    std::ostringstream out;
    out << instance_kind_name(kind) << "(n=" << n;
    switch (kind) {
      case InstanceKind::Distinct: break;
      case InstanceKind::BoundedValues: out << ";levels=" << bounded_levels(); break;
      case InstanceKind::Profiled:
        out << ";k=" << k << ";lambda=" << lambda << ";kappa=" << kappa << ";tail=" << (tail_distinct ? "distinct" : "tied");
        break;
      case InstanceKind::Threshold: out << ";v=" << v << ";kv=" << k_v << ";levels=" << threshold_levels(); break;
    }
    out << ";seed=" << seed << ')';
    return out.str();
  }

  /// 64-bit FNV-1a of describe().
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : describe()) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

namespace detail {

inline std::vector<double> shuffled(std::vector<double> values, Rng& rng) {
  shuffle(std::span(values), rng);
  return values;
}

// `count` elements spread round-robin over `levels` consecutive values starting at `top`
// and going down.
inline void spread(std::vector<double>& out, std::size_t count, std::size_t levels, double top) {
  for (std::size_t i = 0; i < count; ++i) out.push_back(top - static_cast<double>(i % levels));
}

}  // namespace detail

inline Instance generate(const InstanceSpec& spec) {
  const std::size_t n = spec.n;
  if (n == 0) throw ParameterError("generate: n must be positive");
  Rng rng(derive_key(spec.seed, 0x9e4e7ULL));
  std::vector<double> values;
  values.reserve(n);
  switch (spec.kind) {
    case InstanceKind::Distinct:
      for (std::size_t i = 0; i < n; ++i) values.push_back(static_cast<double>(i + 1));
      break;
    case InstanceKind::BoundedValues: {
      const auto levels = spec.bounded_levels();
      const auto cap = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 1.0 - spec.epsilon)));
      if (levels == 0 || levels > n || levels > cap)
        throw ParameterError("generate: bounded instance needs 1 <= levels <= min(n, ceil(n^(1-epsilon)))");
      for (std::size_t i = 0; i < levels; ++i) values.push_back(static_cast<double>(i + 1));
      while (values.size() < n) values.push_back(static_cast<double>(bounded(rng(), levels) + 1));
      break;
    }
    case InstanceKind::Profiled: {
      const auto [k, lambda, kappa] = std::tuple{spec.k, spec.lambda, spec.kappa};
      if (k == 0 || lambda >= k || lambda + kappa < k || lambda + kappa > n)
        throw ParameterError("generate: profiled instance needs lambda < k <= lambda + kappa <= n");
      const std::size_t rest = n - lambda - kappa;
      const double pivot = static_cast<double>(rest + 1);
      for (std::size_t i = 0; i < lambda; ++i) values.push_back(pivot + static_cast<double>(i + 1));
      for (std::size_t i = 0; i < kappa; ++i) values.push_back(pivot);
      if (spec.tail_distinct) {
        for (std::size_t i = 0; i < rest; ++i) values.push_back(static_cast<double>(i + 1));
      } else {
        const auto levels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(rest)))));
        detail::spread(values, rest, levels, pivot - 1);
      }
      break;
    }
    case InstanceKind::Threshold: {
      const auto levels = spec.threshold_levels();
      const std::size_t above = spec.k_v;
      const std::size_t below = n - std::min(above, n);
      if (above > n) throw ParameterError("generate: threshold instance needs k_v <= n");
      if (levels == 0 || levels > n) throw ParameterError("generate: threshold instance needs 1 <= levels <= n");
      std::size_t up = 0;
      if (above > 0) {
        const auto share = static_cast<std::size_t>(std::ceil(static_cast<double>(levels * above) / static_cast<double>(n)));
        up = std::clamp<std::size_t>(share, 1, std::min(above, below > 0 ? levels - 1 : levels));
      }
      const std::size_t down = below > 0 ? std::min(levels - up, below) : 0;
      if (up + down != levels) throw ParameterError("generate: threshold instance cannot use that many levels");
      detail::spread(values, above, std::max<std::size_t>(up, 1), spec.v + static_cast<double>(up) - 1);
      detail::spread(values, below, std::max<std::size_t>(down, 1), spec.v - 1);
      break;
    }
  }
  return Instance(detail::shuffled(std::move(values), rng));
}

/// Ids holding the maximum value.
inline IdSet truth_max(const Instance& inst) {
  IdSet out;
  for (Id i = 0; i < inst.size(); ++i)
    if (inst.value(i) == inst.max_value()) out.push_back(i);
  return out;
}

/// Ids holding the minimum value.
inline IdSet truth_min(const Instance& inst) {
  IdSet out;
  const double low = inst.descending().back();
  for (Id i = 0; i < inst.size(); ++i)
    if (inst.value(i) == low) out.push_back(i);
  return out;
}

/// {i : value(i) >= v}, ascending.
inline IdSet truth_threshold(const Instance& inst, double v) {
  IdSet out;
  for (Id i = 0; i < inst.size(); ++i)
    if (inst.value(i) >= v) out.push_back(i);
  return out;
}

/// The k largest values, largest first.
inline std::vector<double> truth_top_k(const Instance& inst, std::size_t k) {
  if (k > inst.size()) throw ParameterError("truth_top_k: k exceeds n");
  return {inst.descending().begin(), inst.descending().begin() + static_cast<std::ptrdiff_t>(k)};
}

namespace detail {

inline bool distinct_valid_ids(const Instance& inst, const IdSet& ids) {
  IdSet s = ids;
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) == s.end() && (s.empty() || s.back() < inst.size());
}

}  // namespace detail

/// A top-k answer is valid when its value multiset equals the k largest values.
inline bool valid_top_k(const Instance& inst, std::size_t k, const IdSet& ids) {
  if (ids.size() != k || !detail::distinct_valid_ids(inst, ids)) return false;
  std::vector<double> got;
  for (Id x : ids) got.push_back(inst.value(x));
  std::sort(got.begin(), got.end(), std::greater<>());
  return got == truth_top_k(inst, k);
}

/// k distinct ids, each at least the ceil((1 + min(1, gamma)) k)-th largest value.
inline bool valid_approx_top_k(const Instance& inst, std::size_t k, double gamma, const IdSet& ids) {
  if (ids.size() != k || !detail::distinct_valid_ids(inst, ids)) return false;
  const auto rank = static_cast<std::size_t>(std::ceil((1.0 + std::min(1.0, gamma)) * static_cast<double>(k)));
  const double floor_value = inst.kth_value(std::min(rank, inst.size()));
  return std::all_of(ids.begin(), ids.end(), [&](Id x) { return inst.value(x) >= floor_value; });
}

}  // namespace noisy_select
