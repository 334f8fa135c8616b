#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ukfm {

enum class ErrorCode {
  NonSkewInput,
  NearPiRotation,
  NotARotation,
  MalformedEmbedding,
  DimensionMismatch,
  NonPSDCovariance,
  InvalidAlpha,
  CholeskyFailure,
  SingularInnovationCovariance,
  SingularCovariance,
  UnknownLandmarkId,
  InvalidConfig,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Error raised inside a filter recursion, tagged with the step that failed.
class StepError : public Error {
 public:
  StepError(const Error& inner, std::size_t step)
      : Error(inner.code(), "step " + std::to_string(step) + ": " + inner.what()), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSkewInput: return "NonSkewInput";
    case ErrorCode::NearPiRotation: return "NearPiRotation";
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::MalformedEmbedding: return "MalformedEmbedding";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonPSDCovariance: return "NonPSDCovariance";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::SingularInnovationCovariance: return "SingularInnovationCovariance";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::UnknownLandmarkId: return "UnknownLandmarkId";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace ukfm
