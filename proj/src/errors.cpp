#include "mixgap/errors.hpp"

namespace mixgap {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::NonErgodic: return "NonErgodic";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroStationaryEntry: return "ZeroStationaryEntry";
    case ErrorCode::NotReversible: return "NotReversible";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::MissingGap: return "MissingGap";
    case ErrorCode::SkipTooLarge: return "SkipTooLarge";
    case ErrorCode::ZeroCountUnsmoothed: return "ZeroCountUnsmoothed";
    case ErrorCode::EigensolverFailure: return "EigensolverFailure";
    case ErrorCode::DegenerateGap: return "DegenerateGap";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::AbsoluteContinuityViolation: return "AbsoluteContinuityViolation";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace mixgap
