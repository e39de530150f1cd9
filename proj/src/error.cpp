#include "mmfusion/error.hpp"

namespace mmfusion {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kDimMismatch: return "dim-mismatch";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kInvalidProbability: return "invalid-probability";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kMissingModality: return "missing-modality";
    case ErrorCode::kSingleClass: return "single-class";
    case ErrorCode::kEmptyFold: return "empty-fold";
    case ErrorCode::kComputation: return "computation";
  }
  return "unknown";
}

}  // namespace mmfusion
