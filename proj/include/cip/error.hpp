#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cip {

enum class ErrorCode {
  kSyntaxError,
  kUnknownInstruction,
  kArityMismatch,
  kInvalidBudget,
  kAttemptsExhausted,
  kPreconditionViolated,
  kNoInput,
  kNotEnoughCuts,
  kEmptyChain,
  kAbandonProgram,
  kInconsistentCases,
  kSynthesisFailure,
  kRaggedDerives,
  kUnknownUse,
  kInsufficientData,
  kLengthMismatch,
  kZeroVariance,
  kDomainError,
  kConfigInvalid,
  kOutputUnwritable,
  kMalformedInput,
};

std::string_view error_name(ErrorCode code);

/// API-level failure. Runtime faults inside evaluated programs are not
/// exceptions; they travel as cip::Fault inside an Outcome.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace cip
