#include "mlep/error.hpp"

namespace mlep {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDecode: return "decode";
    case ErrorCode::kEncode: return "encode";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnknownVersion: return "unknown-version";
    case ErrorCode::kUnknownDtype: return "unknown-dtype";
    case ErrorCode::kBadHeader: return "bad-header";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kTraining: return "training";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error Error::with_stage(std::string_view stage) const {
  return Error(code_, std::string(stage) + ": " + what());
}

}  // namespace mlep
