#include "hyqmom/error.hpp"

namespace hyqmom {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::InsufficientOrder: return "InsufficientOrder";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::BoundaryBreakdown: return "BoundaryBreakdown";
    case ErrorCode::InvalidCoefficients: return "InvalidCoefficients";
    case ErrorCode::NegativeOffdiagonal: return "NegativeOffdiagonal";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotStrictlyRealizable: return "NotStrictlyRealizable";
    case ErrorCode::Unrealizable: return "Unrealizable";
    case ErrorCode::DegenerateWaveFan: return "DegenerateWaveFan";
    case ErrorCode::RealizabilityLoss: return "RealizabilityLoss";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hyqmom
