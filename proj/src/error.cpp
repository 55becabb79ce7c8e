#include "agentslice/error.hpp"

namespace agentslice {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicatePath: return "DuplicatePath";
    case ErrorKind::UnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorKind::EmptyWorkspace: return "EmptyWorkspace";
    case ErrorKind::CriterionNotFound: return "CriterionNotFound";
    case ErrorKind::EmptyAlignment: return "EmptyAlignment";
    case ErrorKind::CriterionMismatch: return "CriterionMismatch";
    case ErrorKind::ScopeTooLarge: return "ScopeTooLarge";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidTemplate: return "InvalidTemplate";
    case ErrorKind::ProviderError: return "ProviderError";
    case ErrorKind::ReplayMiss: return "ReplayMiss";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::CorruptCassette: return "CorruptCassette";
    case ErrorKind::CassetteConflict: return "CassetteConflict";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::MissingBuggyLines: return "MissingBuggyLines";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace agentslice
