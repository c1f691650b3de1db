#include "nlfb/error.hpp"

namespace nlfb {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Asymmetric: return "Asymmetric";
    case ErrorCode::NegativeDensity: return "NegativeDensity";
    case ErrorCode::ZeroAtOrigin: return "ZeroAtOrigin";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateInterval: return "DegenerateInterval";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NotInTheta2: return "NotInTheta2";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::InvalidInitialU: return "InvalidInitialU";
    case ErrorCode::InvalidInitialV: return "InvalidInitialV";
    case ErrorCode::StabilityViolated: return "StabilityViolated";
    case ErrorCode::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::OutOfScope: return "OutOfScope";
    case ErrorCode::Undecided: return "Undecided";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

}  // namespace nlfb
