#pragma once

#include <stdexcept>
#include <string>

namespace mmfusion {

/// Failure categories. The CLI maps each category to a distinct exit status.
enum class ErrorCode {
  kValidation,       // bad argument or config value
  kIo,               // file cannot be opened, read or written
  kBadMagic,         // EMB1/MDL1 header does not start with the expected magic
  kUnsupportedVersion,
  kTruncated,        // fewer bytes on disk than the header declares
  kDimMismatch,      // vector or matrix dimension does not match its container
  kDuplicateId,
  kInvalidProbability,
  kNonFinite,
  kMissingModality,
  kSingleClass,
  kEmptyFold,
  kComputation,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by alignment when a manifest utterance has no record in one modality.
class MissingModalityError : public Error {
 public:
  MissingModalityError(std::string modality, std::string utterance_id)
      : Error(ErrorCode::kMissingModality,
              "MissingModality(" + modality + ", " + utterance_id + ")"),
        modality_(std::move(modality)),
        utterance_id_(std::move(utterance_id)) {}

  const std::string& modality() const noexcept { return modality_; }
  const std::string& utterance_id() const noexcept { return utterance_id_; }

 private:
  std::string modality_;
  std::string utterance_id_;
};

}  // namespace mmfusion
