#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyqmom {

enum class ErrorCode {
  NonPositiveDensity,
  InsufficientOrder,
  DegreeTooHigh,
  BoundaryBreakdown,
  InvalidCoefficients,
  NegativeOffdiagonal,
  ConvergenceFailure,
  NotStrictlyRealizable,
  Unrealizable,
  DegenerateWaveFan,
  RealizabilityLoss,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library. `index()` carries the rank of a
/// boundary breakdown or the offending cell of a realizability loss.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::size_t index = 0)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::size_t index_;
};

}  // namespace hyqmom
