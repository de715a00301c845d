#pragma once

#include <stdexcept>
#include <string>

namespace qes {

enum class ErrorKind {
  InvalidInput,
  IllConditionedMetric,
  MajorizationError,
  DegenerateColumn,
  ImaginaryResidue,
  InvalidWeights,
  InconsistentSpec,
  MuTooSmall,
  AlreadyMinimal,
  SpanError,
  IndexError,
  TooLarge,
  DimensionMismatch,
  NonFiniteObjective,
  LineSearchFailure,
  NotNegativeDefinite,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type; `kind()` is the
// machine-readable discriminator.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qes
