#pragma once

#include <stdexcept>
#include <string>

namespace noisy_select {

/// Raised when an operation is called outside its documented domain.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised by an oracle for a batch it cannot answer; the session counters are left untouched.
class QueryError : public std::invalid_argument {
 public:
  explicit QueryError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace noisy_select
