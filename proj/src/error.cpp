#include "cip/error.hpp"

#include "cip/instructions.hpp"

namespace cip {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownInstruction: return "UnknownInstruction";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kInvalidBudget: return "InvalidBudget";
    case ErrorCode::kAttemptsExhausted: return "AttemptsExhausted";
    case ErrorCode::kPreconditionViolated: return "PreconditionViolated";
    case ErrorCode::kNoInput: return "NoInput";
    case ErrorCode::kNotEnoughCuts: return "NotEnoughCuts";
    case ErrorCode::kEmptyChain: return "EmptyChain";
    case ErrorCode::kAbandonProgram: return "AbandonProgram";
    case ErrorCode::kInconsistentCases: return "InconsistentCases";
    case ErrorCode::kSynthesisFailure: return "SynthesisFailure";
    case ErrorCode::kRaggedDerives: return "RaggedDerives";
    case ErrorCode::kUnknownUse: return "UnknownUse";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kOutputUnwritable: return "OutputUnwritable";
    case ErrorCode::kMalformedInput: return "MalformedInput";
  }
  return "Error";
}

std::string_view fault_name(Fault fault) {
  switch (fault) {
    case Fault::kTypeMismatch: return "TypeMismatch";
    case Fault::kDivisionByZero: return "DivisionByZero";
    case Fault::kIndexOutOfRange: return "IndexOutOfRange";
    case Fault::kFuelExhausted: return "FuelExhausted";
    case Fault::kWallClockExceeded: return "WallClockExceeded";
    case Fault::kNegativeRange: return "NegativeRange";
    case Fault::kOverflow: return "Overflow";
  }
  return "Fault";
}

}  // namespace cip
