#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frontforge {

enum class ErrorCode {
  NonPositiveRadius,
  InvalidMeasure,
  OutOfBand,
  BadInterval,
  ClassViolation,
  WrongClass,
  InvalidGrid,
  GridTooCoarse,
  UnboundedSupport,
  NoConvergence,
  StageFailed,
  NoBracket,
  TailTooHeavy,
  StabilityViolation,
  OvershootDetected,
  LevelNotAttained,
  TooFewSamples,
  BadParameters,
  WindowExceeded,
  NotMonotoneLadder,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace frontforge
