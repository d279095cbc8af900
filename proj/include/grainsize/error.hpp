#ifndef GRAINSIZE_ERROR_HPP
#define GRAINSIZE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace grainsize {

// Values are mirrored by gs_status in grainsize.h; keep the two in sync.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Io = 2,
  UnsupportedFormat = 3,
  DimensionMismatch = 4,
  LabelOverflow = 5,
  TargetUnreachable = 6,
  EmptyMask = 7,
  NonPositiveDensity = 8,
  NoMatch = 9,
  MissingPatch = 10,
  DuplicateCoordinate = 11,
  MissingClassification = 12,
  CircleOutOfCanvas = 13,
  ZeroGroundTruth = 14,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace grainsize

#endif  // GRAINSIZE_ERROR_HPP
