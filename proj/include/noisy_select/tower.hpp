#pragma once

#include <cmath>
#include <cstddef>

#include "noisy_select/errors.hpp"

namespace noisy_select {

namespace detail {

inline double log_base(double a, double b) {
  double v = b == 2.0 ? std::log2(a) : std::log(a) / std::log(b);
  // Keep exact powers exact: log_3(27) must be 3, not 3 + 4e-16.
  const double r = std::round(v);
  if (r != 0.0 && std::fabs(v - r) <= 1e-12 * std::fabs(r)) v = r;
  return v;
}

}  // namespace detail

/// Least i with a_i <= 0, where a_0 = n and a_{i+1} = log_b(a_i).
/// At or below b = e^(1/e) the map has a fixed point and the sequence can stall above 0,
/// so such bases are rejected unless n <= 1.
inline int log_star(double n, double b) {
  if (!(b > 1.0)) throw ParameterError("log_star: base must exceed 1");
  if (n > 1.0 && b <= std::exp(1.0 / std::exp(1.0)))
    throw ParameterError("log_star: base must exceed e^(1/e) when n > 1");
  int i = 0;
  for (double a = n; a > 0.0; ++i) a = detail::log_base(a, b);
  return i;
}

struct TowerValue {
  double value = 0.0;
  bool saturated = false;
};

/// b, b^b, b^(b^b), ... (i levels), clamped at `cap`.
inline TowerValue tower(double b, int i, double cap = 1e300) {
  if (!(b > 1.0)) throw ParameterError("tower: base must exceed 1");
  if (i < 1) throw ParameterError("tower: height must be at least 1");
  const double log_cap = std::log(cap);
  if (b >= cap) return {cap, true};
  double v = b;
  for (int j = 1; j < i; ++j) {
    if (v * std::log(b) >= log_cap) return {cap, true};
    v = std::pow(b, v);
  }
  return {v, false};
}

/// Tower of b/delta with i levels.
inline TowerValue zeta(double b, double delta, int i, double cap = 1e300) { return tower(b / delta, i, cap); }

/// Smallest base b >= 2 (to within 1e-6) with log_star(n, b) <= r - 4.
/// For n > 1 every base gives log_star(n, b) >= 2, so r must be at least 6 there.
inline double solve_base(double n, int r) {
  const int target = r - 4;
  if (target < 1) throw ParameterError("solve_base: need r >= 5");
  if (log_star(n, 2.0) <= target) return 2.0;
  if (n > 1.0 && target < 2) throw ParameterError("solve_base: r - 4 = 1 is unreachable for n > 1; need r >= 6");
  double lo = 2.0;
  double hi = 4.0;
  while (log_star(n, hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-6; ++it) {
    const double mid = lo + (hi - lo) / 2.0;
    (log_star(n, mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace noisy_select
