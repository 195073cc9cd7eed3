#include "crowdlens/error.hpp"

namespace crowdlens {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotonicFrames: return "NonMonotonicFrames";
    case ErrorCode::NonFinitePosition: return "NonFinitePosition";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::RegistryParse: return "RegistryParse";
    case ErrorCode::AnnotationParse: return "AnnotationParse";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TrackLost: return "TrackLost";
    case ErrorCode::FrameAbsent: return "FrameAbsent";
    case ErrorCode::PedestrianAbsent: return "PedestrianAbsent";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::NoFrames: return "NoFrames";
    case ErrorCode::EmptyRegistryFactor: return "EmptyRegistryFactor";
    case ErrorCode::TraitUnavailable: return "TraitUnavailable";
    case ErrorCode::NegativeSpeed: return "NegativeSpeed";
    case ErrorCode::IncompleteAnalyses: return "IncompleteAnalyses";
    case ErrorCode::PedestrianMissing: return "PedestrianMissing";
    case ErrorCode::UnknownScene: return "UnknownScene";
    case ErrorCode::FrameOutOfRange: return "FrameOutOfRange";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
  }
  return "Unknown";
}

bool is_parse_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::MalformedHeader:
    case ErrorCode::MalformedRow:
    case ErrorCode::NonMonotonicFrames:
    case ErrorCode::NonFinitePosition:
    case ErrorCode::EmptyScene:
    case ErrorCode::RegistryParse:
    case ErrorCode::AnnotationParse:
    case ErrorCode::ConfigParse:
      return true;
    default:
      return false;
  }
}

}  // namespace crowdlens
