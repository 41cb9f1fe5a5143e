#pragma once

#include <stdexcept>
#include <string>

namespace noisylab {

// Raised when an argument or configuration value violates a documented
// precondition. `field()` names the offending parameter when known.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& message, std::string field = {})
      : std::invalid_argument(message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Non-finite logits, gradients or parameters.
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace noisylab
