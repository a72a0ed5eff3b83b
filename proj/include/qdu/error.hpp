#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdu {

enum class ErrorKind {
  ZeroVector,
  DimensionMismatch,
  NonHermitianDrift,
  NotCommuting,
  InvariantViolation,
  NegativeProbability,
  ColorMismatch,
  NegativePayoff,
  InvalidUrn,
  InvalidPattern,
  PairsNotSureThingRelated,
  EmptyPriorSet,
  MissingEvent,
  InvalidCapacity,
  InvalidDistribution,
  InvalidPenalty,
  OutOfRange,
  UnknownAct,
  ConstraintViolated,
  NotFound,
  BadBasis,
  EmptyData,
  FitFailed,
  NonFiniteObjective,
  InvalidSpec,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) fail(kind, message);
}

}  // namespace qdu
