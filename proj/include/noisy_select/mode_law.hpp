#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "noisy_select/instance.hpp"

namespace noisy_select::detail {

// Distribution of the most frequent answer (ties to the larger value) among `per` value
// answers about one element, each a lie with probability 1/3. Values are identified by
// their level: position among the instance's distinct values, largest first.

inline double lie_count_probability(std::uint32_t per, std::uint32_t lies) {
  double c = 1.0;
  for (std::uint32_t i = 1; i <= lies; ++i) c = c * (per - lies + i) / i;
  return c * std::pow(1.0 / 3.0, lies) * std::pow(2.0 / 3.0, per - lies);
}

/// Law over levels with prefix tails: tail[a] = P(level >= a), i.e. value <= level a's value.
struct LevelLaw {
  std::vector<double> p;
  std::vector<double> tail;

  void finish() {
    tail.assign(p.size() + 1, 0.0);
    for (std::size_t i = p.size(); i-- > 0;) tail[i] = tail[i + 1] + p[i];
  }
};

/// Inverse-CDF table of Binomial(g, q).
inline std::vector<double> binomial_cdf(std::uint32_t g, double q) {
  std::vector<double> cdf(g + 1);
  if (q <= 0.0 || q >= 1.0) {
    for (std::uint32_t k = 0; k <= g; ++k) cdf[k] = q <= 0.0 || k == g ? 1.0 : 0.0;
    return cdf;
  }
  const double lq = std::log(q);
  const double lr = std::log1p(-q);
  const double lg = std::lgamma(g + 1.0);
  double acc = 0.0;
  for (std::uint32_t k = 0; k <= g; ++k) {
    acc += std::exp(lg - std::lgamma(k + 1.0) - std::lgamma(g - k + 1.0) + k * lq + (g - k) * lr);
    cdf[k] = acc;
  }
  cdf[g] = 1.0;
  return cdf;
}

/// Index drawn from an inverse-CDF table with one 64-bit word.
inline std::uint32_t sample_cdf(const std::vector<double>& cdf, std::uint64_t word) {
  const double u = static_cast<double>(word >> 11) * 0x1.0p-53;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

class ModeLaws {
 public:
  /// Beyond this many distinct values the uniform-liar law is not tabulated.
  static constexpr std::size_t kMaxLevels = 512;

  ModeLaws(const Instance& instance, std::uint32_t per) : per_(per) {
    const auto& desc = instance.descending();
    for (std::size_t i = 0; i < desc.size();) {
      std::size_t j = i;
      while (j < desc.size() && desc[j] == desc[i]) ++j;
      level_value_.push_back(desc[i]);
      weight_.push_back(static_cast<double>(j - i));
      i = j;
    }
    total_ = static_cast<double>(desc.size());
    lie_count_.resize(per + 1);
    for (std::uint32_t l = 0; l <= per; ++l) lie_count_[l] = lie_count_probability(per, l);
    uniform_.resize(levels());
  }

  std::uint32_t per() const noexcept { return per_; }
  std::size_t levels() const noexcept { return level_value_.size(); }
  bool tabulates_uniform() const noexcept { return levels() <= kMaxLevels; }

  std::uint32_t level_of(double value) const {
    const auto it = std::lower_bound(level_value_.begin(), level_value_.end(), value, std::greater<>());
    return static_cast<std::uint32_t>(it - level_value_.begin());
  }

  /// P(mode is the lie) when every lie reports the same value, at level `lie`, and the truth is at `truth`.
  double fixed_lie_wins(std::uint32_t truth, std::uint32_t lie) const {
    double p = 0.0;
    for (std::uint32_t l = 0; l <= per_; ++l) {
      const std::uint32_t t = per_ - l;
      if (l > t || (l == t && lie < truth)) p += lie_count_[l];
    }
    return p;
  }

  /// Law of the mode when lies are uniform over the value multiset minus the truth's copies.
  const LevelLaw& uniform(std::uint32_t truth) {
    auto& slot = uniform_[truth];
    if (!slot) slot = uniform_law(truth);
    return *slot;
  }

 private:
  using Poly = std::vector<double>;

  // poly *= sum_{a <= lim} (pi z)^a / a!, truncated at degree deg.
  static void times_exp(Poly& poly, double pi, int lim, std::size_t deg) {
    if (lim < 0) {
      std::fill(poly.begin(), poly.end(), 0.0);
      return;
    }
    double term[64];
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(lim), deg);
    term[0] = 1.0;
    for (std::size_t a = 1; a <= top; ++a) term[a] = term[a - 1] * pi / static_cast<double>(a);
    for (std::size_t d = deg + 1; d-- > 0;) {
      double s = 0.0;
      for (std::size_t a = 0; a <= std::min(top, d); ++a) s += poly[d - a] * term[a];
      poly[d] = s;
    }
  }

  LevelLaw uniform_law(std::uint32_t truth) const {
    const std::size_t m = levels();
    LevelLaw law;
    law.p.assign(m, 0.0);
    const double others = total_ - weight_[truth];
    if (others <= 0.0) {
      law.p[truth] = 1.0;
      law.finish();
      return law;
    }
    std::vector<double> pi(m);
    for (std::size_t i = 0; i < m; ++i) pi[i] = i == truth ? 0.0 : weight_[i] / others;

    std::vector<double> fact(per_ + 1, 1.0);
    for (std::uint32_t i = 1; i <= per_; ++i) fact[i] = fact[i - 1] * i;

    for (std::uint32_t lies = 0; lies <= per_; ++lies) {
      const double pl = lie_count_[lies];
      const auto t = static_cast<int>(per_ - lies);
      if (static_cast<int>(lies) < t) {
        law.p[truth] += pl;
        continue;
      }
      // Truth is the mode: every lie level stays below t, or ties with it from below.
      {
        Poly poly(lies + 1, 0.0);
        poly[0] = 1.0;
        for (std::size_t i = 0; i < m; ++i)
          if (i != truth) times_exp(poly, pi[i], i < truth ? t - 1 : t, lies);
        law.p[truth] += pl * fact[lies] * poly[lies];
      }
      // Lie level j is the mode with c copies.
      for (int c = std::max(1, t); c <= static_cast<int>(lies); ++c) {
        const std::size_t deg = lies - static_cast<std::size_t>(c);
        std::vector<Poly> suffix(m + 1, Poly(deg + 1, 0.0));
        suffix[m][0] = 1.0;
        for (std::size_t j = m; j-- > 0;) {
          suffix[j] = suffix[j + 1];
          if (j + 1 < m && j + 1 != truth) times_exp(suffix[j], pi[j + 1], c, deg);
        }
        Poly prefix(deg + 1, 0.0);
        prefix[0] = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
          if (j != truth && !(c == t && j > truth)) {
            double coef = 0.0;
            for (std::size_t a = 0; a <= deg; ++a) coef += prefix[a] * suffix[j][deg - a];
            law.p[j] += pl * fact[lies] / fact[static_cast<std::size_t>(c)] * std::pow(pi[j], c) * coef;
          }
          if (j != truth) times_exp(prefix, pi[j], c - 1, deg);
        }
      }
    }
    law.finish();
    return law;
  }

  std::uint32_t per_;
  std::vector<double> level_value_;
  std::vector<double> weight_;
  double total_ = 0.0;
  std::vector<double> lie_count_;
  std::vector<std::optional<LevelLaw>> uniform_;
};

}  // namespace noisy_select::detail
