#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "noisy_select/errors.hpp"

namespace noisy_select {

/// Every tunable constant used by the algorithms. Defaults follow the original analysis;
/// the meta-runner caps were fitted once on the acceptance grid and frozen here.
struct Constants {
  // comparisons
  std::uint32_t tie_repeats = 11;       // R of the dual-majority three-outcome comparison
  std::uint32_t reduction_repeats = 9;  // value queries per element per simulated comparison

  // max
  double one_round_c = 48.0;
  double y_compare_c = 24.0;
  double loop_c = 144.0;
  std::uint32_t min_parallel_n = 64;  // below this ParallelMax is OneRoundMax

  // threshold
  double threshold_tau_c = 100.0;
  double threshold_delta_c = 64.0;
  int threshold_round_offset = 4;
  double threshold_initial_estimate = 2.0;
  double meta_query_c = 8.0e6;  // value queries per n log2 n, both sides together
  double meta_round_c = 4.0;

  // top-k
  double topk_partition_c = 4.0;
  double topk_final_c = 1000.0;
  double topk_fallback_root = 12.0;
  double fallback_c = 24.0;
  double approx_parts_c = 20.0;
  double approx_error_c = 80.0;

  // rank-k
  std::uint32_t distinct_block = 12;
  double distinct_bar_c = 20.0;
  double distinct_budget_c = 34000.0;
  double distinct_hard_cap = 3.0;

  double tower_cap = 1e300;

  static const Constants& defaults() {
    static const Constants c{};
    return c;
  }

  /// Applies one `key=value` override.
  void set(std::string_view key, std::string_view value) {
    const std::string v(value);
    auto as_double = [&] {
      std::size_t used = 0;
      double d = 0;
      try {
        d = std::stod(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != v.size()) throw ParameterError("constants: bad number '" + v + "' for " + std::string(key));
      return d;
    };
    auto as_u32 = [&] { return static_cast<std::uint32_t>(as_double()); };
    const std::map<std::string_view, std::function<void()>> setters = {
        {"tie_repeats", [&] { tie_repeats = as_u32(); }},
        {"reduction_repeats", [&] { reduction_repeats = as_u32(); }},
        {"one_round_c", [&] { one_round_c = as_double(); }},
        {"y_compare_c", [&] { y_compare_c = as_double(); }},
        {"loop_c", [&] { loop_c = as_double(); }},
        {"min_parallel_n", [&] { min_parallel_n = as_u32(); }},
        {"threshold_tau_c", [&] { threshold_tau_c = as_double(); }},
        {"threshold_delta_c", [&] { threshold_delta_c = as_double(); }},
        {"threshold_round_offset", [&] { threshold_round_offset = static_cast<int>(as_double()); }},
        {"threshold_initial_estimate", [&] { threshold_initial_estimate = as_double(); }},
        {"meta_query_c", [&] { meta_query_c = as_double(); }},
        {"meta_round_c", [&] { meta_round_c = as_double(); }},
        {"topk_partition_c", [&] { topk_partition_c = as_double(); }},
        {"topk_final_c", [&] { topk_final_c = as_double(); }},
        {"topk_fallback_root", [&] { topk_fallback_root = as_double(); }},
        {"fallback_c", [&] { fallback_c = as_double(); }},
        {"approx_parts_c", [&] { approx_parts_c = as_double(); }},
        {"approx_error_c", [&] { approx_error_c = as_double(); }},
        {"distinct_block", [&] { distinct_block = as_u32(); }},
        {"distinct_bar_c", [&] { distinct_bar_c = as_double(); }},
        {"distinct_budget_c", [&] { distinct_budget_c = as_double(); }},
        {"distinct_hard_cap", [&] { distinct_hard_cap = as_double(); }},
        {"tower_cap", [&] { tower_cap = as_double(); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParameterError("constants: unknown key '" + std::string(key) + "'");
    it->second();
    if (tie_repeats % 2 == 0 || tie_repeats == 0) throw ParameterError("constants: tie_repeats must be odd");
    if (reduction_repeats == 0) throw ParameterError("constants: reduction_repeats must be positive");
  }

  /// Reads `key=value` lines; blank lines and `#` comments are skipped.
  static Constants parse(std::istream& in) {
    Constants c;
    std::string line;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      if (trim(line).empty()) continue;
      if (eq == std::string::npos) throw ParameterError("constants: expected key=value, got '" + line + "'");
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
  }

  /// Defaults, overridden by the file named in NOISY_SELECT_CONSTANTS when set.
  static Constants from_environment() {
    const char* path = std::getenv("NOISY_SELECT_CONSTANTS");
    if (path == nullptr || *path == '\0') return Constants{};
    std::ifstream in(path);
    if (!in) throw ParameterError(std::string("constants: cannot open ") + path);
    return parse(in);
  }
};

}  // namespace noisy_select
