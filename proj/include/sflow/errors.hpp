#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace sflow {

/// Precondition violated by the caller (bad dimensions, malformed spec, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a certified answer.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what,
                            std::optional<double> lambda = std::nullopt)
      : std::runtime_error(what), lambda_(lambda) {}

  /// Parameter value at which the failure was detected, when meaningful.
  std::optional<double> lambda() const { return lambda_; }

 private:
  std::optional<double> lambda_;
};

}  // namespace sflow
