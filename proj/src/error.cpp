#include "grainsize/error.hpp"

namespace grainsize {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::UnsupportedFormat: return "unsupported format";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::LabelOverflow: return "label overflow";
    case ErrorCode::TargetUnreachable: return "target unreachable";
    case ErrorCode::EmptyMask: return "empty mask";
    case ErrorCode::NonPositiveDensity: return "non-positive density";
    case ErrorCode::NoMatch: return "no match";
    case ErrorCode::MissingPatch: return "missing patch";
    case ErrorCode::DuplicateCoordinate: return "duplicate coordinate";
    case ErrorCode::MissingClassification: return "missing classification";
    case ErrorCode::CircleOutOfCanvas: return "circle out of canvas";
    case ErrorCode::ZeroGroundTruth: return "zero ground truth";
  }
  return "unknown error";
}

}  // namespace grainsize
