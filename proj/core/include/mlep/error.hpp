#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlep {

enum class ErrorCode {
  kDecode,           // malformed PNG/JPEG payload
  kEncode,
  kDimension,        // size/shape precondition violated
  kConfig,           // invalid configuration or argument value
  kBadMagic,         // .mlep tensor stream: wrong magic
  kUnknownVersion,   // .mlep tensor stream: unsupported version byte
  kUnknownDtype,     // .mlep tensor stream: unsupported dtype byte
  kBadHeader,        // .mlep tensor stream: reserved bytes non-zero or trailing data
  kTruncated,        // stream ended before the declared payload
  kParse,            // JSON / CSV document malformed
  kTraining,         // training data unusable (e.g. single class)
  kUndefinedMetric,  // metric undefined for the input (e.g. AP with no positives)
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. The code is stable and is what
/// callers (and the CLI exit-code mapping) should branch on; the message is
/// for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Same code, message prefixed with the pipeline stage that failed.
  Error with_stage(std::string_view stage) const;

 private:
  ErrorCode code_;
};

}  // namespace mlep
