#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace camcue {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveDepth,
  NotARotation,
  SingularMatrix,
  SingularRotation,
  ShapeMismatch,
  ConfigError,
  DivergedLoss,
  EmptySamples,
  InsufficientCandidates,
  EmptySampleSet,
  CameraOutsideRoom,
  MalformedPose,
  MalformedIntrinsics,
  MissingKey,
  NonPositiveFocal,
  BadMagic,
  TruncatedPayload,
  TrailingData,
  InvalidValue,
  MalformedLine,
  MalformedScene,
  IoError,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::SingularRotation: return "SingularRotation";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::InsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::EmptySampleSet: return "EmptySampleSet";
    case ErrorCode::CameraOutsideRoom: return "CameraOutsideRoom";
    case ErrorCode::MalformedPose: return "MalformedPose";
    case ErrorCode::MalformedIntrinsics: return "MalformedIntrinsics";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::NonPositiveFocal: return "NonPositiveFocal";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::MalformedScene: return "MalformedScene";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// Library failures carry an ErrorCode.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace camcue
