#include "qdu/error.hpp"

namespace qdu {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonHermitianDrift: return "NonHermitianDrift";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::NegativeProbability: return "NegativeProbability";
    case ErrorKind::ColorMismatch: return "ColorMismatch";
    case ErrorKind::NegativePayoff: return "NegativePayoff";
    case ErrorKind::InvalidUrn: return "InvalidUrn";
    case ErrorKind::InvalidPattern: return "InvalidPattern";
    case ErrorKind::PairsNotSureThingRelated: return "PairsNotSureThingRelated";
    case ErrorKind::EmptyPriorSet: return "EmptyPriorSet";
    case ErrorKind::MissingEvent: return "MissingEvent";
    case ErrorKind::InvalidCapacity: return "InvalidCapacity";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::InvalidPenalty: return "InvalidPenalty";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::UnknownAct: return "UnknownAct";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::BadBasis: return "BadBasis";
    case ErrorKind::EmptyData: return "EmptyData";
    case ErrorKind::FitFailed: return "FitFailed";
    case ErrorKind::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace qdu
