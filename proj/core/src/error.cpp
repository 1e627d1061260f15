#include "frontforge/error.hpp"

namespace frontforge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::OutOfBand: return "OutOfBand";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::ClassViolation: return "ClassViolation";
    case ErrorCode::WrongClass: return "WrongClass";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::UnboundedSupport: return "UnboundedSupport";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StageFailed: return "StageFailed";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::TailTooHeavy: return "TailTooHeavy";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::OvershootDetected: return "OvershootDetected";
    case ErrorCode::LevelNotAttained: return "LevelNotAttained";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::WindowExceeded: return "WindowExceeded";
    case ErrorCode::NotMonotoneLadder: return "NotMonotoneLadder";
  }
  return "Unknown";
}

}  // namespace frontforge
