#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace indef {

enum class ErrorCode {
  DomainError,
  NoPositivityInterval,
  UnboundedDerivative,
  NonpositiveMinimum,
  StepFailure,
  NoConvergence,
  SingularJacobian,
  PreconditionViolated,
  ZeroOnBoundary,
  ZeroAtEndpoint,
  UncoveredZero,
  EmptyCore,
  AverageNotNegative,
  NoNegativePart,
  InvalidArgument,
  SchemaError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoPositivityInterval: return "NoPositivityInterval";
    case ErrorCode::UnboundedDerivative: return "UnboundedDerivative";
    case ErrorCode::NonpositiveMinimum: return "NonpositiveMinimum";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ZeroOnBoundary: return "ZeroOnBoundary";
    case ErrorCode::ZeroAtEndpoint: return "ZeroAtEndpoint";
    case ErrorCode::UncoveredZero: return "UncoveredZero";
    case ErrorCode::EmptyCore: return "EmptyCore";
    case ErrorCode::AverageNotNegative: return "AverageNotNegative";
    case ErrorCode::NoNegativePart: return "NoNegativePart";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

}  // namespace indef
