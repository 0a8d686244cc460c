#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "noisy_select/errors.hpp"

namespace noisy_select {

using Id = std::uint32_t;

/// Counts around the k-th largest value v_k.
struct KProfile {
  std::size_t lambda = 0;  // values strictly greater than v_k
  std::size_t kappa = 0;   // values equal to v_k
  std::size_t slack = 0;   // lambda + kappa - k
};

/// Hidden ground truth: one value per element id 0..n-1.
class Instance {
 public:
  Instance() = default;

  explicit Instance(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
      if (!std::isfinite(v)) throw ParameterError("instance: values must be finite");
    descending_ = values_;
    std::sort(descending_.begin(), descending_.end(), std::greater<>());
    distinct_ = descending_.empty() ? 0 : 1;
    for (std::size_t i = 1; i < descending_.size(); ++i)
      if (descending_[i] != descending_[i - 1]) ++distinct_;
  }

  std::size_t size() const noexcept { return values_.size(); }
  double value(Id id) const { return values_.at(id); }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Values sorted from largest to smallest.
  const std::vector<double>& descending() const noexcept { return descending_; }
  std::size_t distinct_values() const noexcept { return distinct_; }
  bool all_distinct() const noexcept { return distinct_ == values_.size(); }
  double max_value() const { return descending_.front(); }

  /// The k-th largest value (1-based).
  double kth_value(std::size_t k) const {
    if (k == 0 || k > size()) throw ParameterError("instance: k out of range");
    return descending_[k - 1];
  }

  KProfile profile(std::size_t k) const {
    const double vk = kth_value(k);
    KProfile p;
    for (double v : values_) {
      if (v > vk) ++p.lambda;
      else if (v == vk) ++p.kappa;
    }
    p.slack = p.lambda + p.kappa - k;
    return p;
  }

  std::vector<Id> ids() const {
    std::vector<Id> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Id>(i);
    return out;
  }

 private:
  std::vector<double> values_;
  std::vector<double> descending_;
  std::size_t distinct_ = 0;
};

/// Instance file: header `n=<int> distinct=<0|1>`, then one decimal value per line.
inline void write_instance(std::ostream& out, const Instance& instance) {
  out << "n=" << instance.size() << " distinct=" << (instance.all_distinct() ? 1 : 0) << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (double v : instance.values()) out << v << '\n';
}

inline Instance read_instance(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParameterError("instance file: missing header");
  std::size_t n = 0;
  int distinct = -1;
  {
    std::istringstream hs(header);
    std::string token;
    while (hs >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw ParameterError("instance file: bad header token '" + token + "'");
      const auto key = token.substr(0, eq);
      const auto val = token.substr(eq + 1);
      if (key == "n") n = std::stoull(val);
      else if (key == "distinct") distinct = std::stoi(val);
      else throw ParameterError("instance file: unknown header key '" + key + "'");
    }
  }
  if (distinct != 0 && distinct != 1) throw ParameterError("instance file: distinct must be 0 or 1");
  std::vector<double> values;
  values.reserve(n);
  std::string line;
  while (values.size() < n && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t used = 0;
    const double v = std::stod(line, &used);
    if (line.find_first_not_of(" \t\r", used) != std::string::npos)
      throw ParameterError("instance file: bad value line '" + line + "'");
    values.push_back(v);
  }
  if (values.size() != n) throw ParameterError("instance file: expected " + std::to_string(n) + " values");
  Instance instance(std::move(values));
  if (instance.all_distinct() != (distinct == 1))
    throw ParameterError("instance file: distinct flag does not match the values");
  return instance;
}

}  // namespace noisy_select
