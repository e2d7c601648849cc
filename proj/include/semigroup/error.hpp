#pragma once

#include <stdexcept>
#include <string>

namespace semigroup {

enum class ErrorCode {
  SingularMatrix,
  NotSymmetric,
  Overflow,
  SpaceMismatch,
  NotCoercive,
  Singular,
  DimensionMismatch,
  SingularExtension,
  OutsideWindow,
  InvalidBC,
  NonPositiveCoefficient,
  SingularStep,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace semigroup
