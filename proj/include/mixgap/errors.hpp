#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixgap {

enum class ErrorCode {
  InvalidArgument,
  InvalidMatrix,
  InvalidDistribution,
  NonErgodic,
  NoConvergence,
  ZeroStationaryEntry,
  NotReversible,
  NotSymmetric,
  Overflow,
  MissingGap,
  SkipTooLarge,
  ZeroCountUnsmoothed,
  EigensolverFailure,
  DegenerateGap,
  ConstraintViolation,
  AbsoluteContinuityViolation,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace mixgap
