#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noisy_select/oracle.hpp"
#include "noisy_select/query.hpp"

namespace noisy_select {

/// Error of one simulated comparison's per-element majority: majority of 9 value answers.
inline constexpr Fraction kReductionMajorityError = majority_error(9);
/// Error of each direction of the three-outcome comparison (R = 11).
inline constexpr Fraction kTieMajorityError = majority_error(11);

/// Comparison view of a value-model oracle. "x >= y?" is answered by querying x and y
/// `repeats` times each in the same round and comparing the two most frequent answers.
/// Value requests pass straight through.
class ComparisonFromValue final : public Oracle {
 public:
  explicit ComparisonFromValue(OracleSession& base, std::uint32_t repeats = 9) : base_(base), repeats_(repeats) {
    if (repeats == 0) throw ParameterError("comparison_from_value: repeats must be positive");
    if (base.model() != Model::Value) throw ParameterError("comparison_from_value: needs a value-model session");
  }

  std::vector<Reply> ask(std::span<const Request> batch) override {
    for (const auto& r : batch) {
      if (r.repeat == 0 || r.group == 0 || r.repeat % r.group != 0 || r.group > UINT32_MAX)
        throw QueryError("repeat must be a positive multiple of group");
      if (r.query.x >= base_.size() || (r.query.kind == QueryKind::Compare && r.query.y >= base_.size()))
        throw QueryError("query id out of range");
      if (r.query.kind == QueryKind::Compare && r.query.x == r.query.y) throw QueryError("self-comparison");
    }
    OracleSession::Round round(base_);
    std::vector<Reply> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto& r = batch[i];
      const std::uint64_t groups = r.repeat / r.group;
      if (r.query.kind == QueryKind::Value) {
        out[i].values.resize(groups);
        for (auto& v : out[i].values) v = round.value_mode(r.query.x, static_cast<std::uint32_t>(r.group));
        continue;
      }
      out[i].yes.resize(groups);
      round.mode_compare(r.query.x, r.query.y, static_cast<std::uint32_t>(r.group), repeats_, out[i].yes);
    }
    round.commit();
    return out;
  }

  Accounting accounting() const override { return base_.accounting(); }
  std::size_t size() const override { return base_.size(); }
  std::uint32_t repeats() const noexcept { return repeats_; }

 private:
  OracleSession& base_;
  std::uint32_t repeats_;
};

inline ComparisonFromValue comparison_from_value(OracleSession& value_oracle, std::uint32_t repeats = 9) {
  return ComparisonFromValue(value_oracle, repeats);
}

}  // namespace noisy_select
