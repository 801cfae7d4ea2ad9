#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace motseg {

enum class ErrorCode {
  kInvalidArgument,
  kCountsSumMismatch,
  kNegativeRun,
  kMalformedToken,
  kShapeMismatch,
  kEmptyBox,
  kDimensionMismatch,
  kEmptyBank,
  kNonMonotonicFrame,
  kDegenerateInput,
  kOutOfOrderFrame,
  kParseError,
  kMaskDimMismatch,
  kMissingFeatures,
  kOverlapAfterResolution,
  kUnknownKey,
  kTypeError,
  kRangeError,
  kSpecOutOfBounds,
  kDimMismatch,
  kOverlappingMasksInInput,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kCountsSumMismatch: return "CountsSumMismatch";
    case ErrorCode::kNegativeRun: return "NegativeRun";
    case ErrorCode::kMalformedToken: return "MalformedToken";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyBox: return "EmptyBox";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyBank: return "EmptyBank";
    case ErrorCode::kNonMonotonicFrame: return "NonMonotonicFrame";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kOutOfOrderFrame: return "OutOfOrderFrame";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMaskDimMismatch: return "MaskDimMismatch";
    case ErrorCode::kMissingFeatures: return "MissingFeatures";
    case ErrorCode::kOverlapAfterResolution: return "OverlapAfterResolution";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kTypeError: return "TypeError";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kSpecOutOfBounds: return "SpecOutOfBounds";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kOverlappingMasksInInput: return "OverlappingMasksInInput";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above so
// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace motseg
