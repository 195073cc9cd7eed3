#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crowdlens {

enum class ErrorCode {
  // Input parsing. Reported with exit code 2.
  Io,
  MalformedHeader,
  MalformedRow,
  NonMonotonicFrames,
  NonFinitePosition,
  EmptyScene,
  RegistryParse,
  AnnotationParse,
  ConfigParse,
  // Everything else is an invariant violation (exit code 3).
  SingularTransform,
  PointAtInfinity,
  TooFewSamples,
  TrackLost,
  FrameAbsent,
  PedestrianAbsent,
  FrameMismatch,
  NoFrames,
  EmptyRegistryFactor,
  TraitUnavailable,
  NegativeSpeed,
  IncompleteAnalyses,
  PedestrianMissing,
  UnknownScene,
  FrameOutOfRange,
  UnknownSession,
  StoreUnavailable,
  InvalidParameter,
};

std::string_view to_string(ErrorCode code);

/// True for errors caused by unreadable or ill-formed input files.
bool is_parse_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crowdlens
