#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlfb {

enum class ErrorCode {
  InvalidArgument,
  // kernels
  Asymmetric,
  NegativeDensity,
  ZeroAtOrigin,
  ZeroMass,
  GridMismatch,
  // eigenvalue
  NoConvergence,
  DegenerateInterval,
  // dynamics_ode
  InvalidParams,
  StepTooLarge,
  NotInTheta2,
  AssumptionViolated,
  InvalidSigma,
  // simulator
  InvalidInitialU,
  InvalidInitialV,
  StabilityViolated,
  NonPositiveParameter,
  // diagnostics
  WindowTooSmall,
  SeriesTooShort,
  OutOfScope,
  Undecided,
  // runner_io
  ConfigInvalid,
  GridTooLarge,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace nlfb
