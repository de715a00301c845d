#include "qes/error.hpp"

namespace qes {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::IllConditionedMetric: return "IllConditionedMetric";
    case ErrorKind::MajorizationError: return "MajorizationError";
    case ErrorKind::DegenerateColumn: return "DegenerateColumn";
    case ErrorKind::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorKind::InvalidWeights: return "InvalidWeights";
    case ErrorKind::InconsistentSpec: return "InconsistentSpec";
    case ErrorKind::MuTooSmall: return "MuTooSmall";
    case ErrorKind::AlreadyMinimal: return "AlreadyMinimal";
    case ErrorKind::SpanError: return "SpanError";
    case ErrorKind::IndexError: return "IndexError";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorKind::LineSearchFailure: return "LineSearchFailure";
    case ErrorKind::NotNegativeDefinite: return "NotNegativeDefinite";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace qes
