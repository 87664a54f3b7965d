#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tkg {

enum class ErrorCode {
  // ingestion
  MalformedRecord,
  DuplicateTrack,
  CoordinateOutOfRange,
  NonIncreasingFrames,
  InvalidScript,
  InfeasibleScript,
  InfeasibleParams,
  // graph
  SameTubelet,
  VideoMismatch,
  MalformedGraphFile,
  InvariantViolation,
  // synthesis / validation
  TemplateMismatch,
  InvalidProgram,
  InsufficientGraph,
  StaleSample,
  EmptyInput,
  UnverifiedSample,
  EmptyMatrix,
  // profiling
  EmptyDataset,
  UnknownSampleId,
  DuplicatePrediction,
  MalformedDataset,
  // configuration
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateTrack: return "DuplicateTrack";
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::NonIncreasingFrames: return "NonIncreasingFrames";
    case ErrorCode::InvalidScript: return "InvalidScript";
    case ErrorCode::InfeasibleScript: return "InfeasibleScript";
    case ErrorCode::InfeasibleParams: return "InfeasibleParams";
    case ErrorCode::SameTubelet: return "SameTubelet";
    case ErrorCode::VideoMismatch: return "VideoMismatch";
    case ErrorCode::MalformedGraphFile: return "MalformedGraphFile";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::TemplateMismatch: return "TemplateMismatch";
    case ErrorCode::InvalidProgram: return "InvalidProgram";
    case ErrorCode::InsufficientGraph: return "InsufficientGraph";
    case ErrorCode::StaleSample: return "StaleSample";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnverifiedSample: return "UnverifiedSample";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnknownSampleId: return "UnknownSampleId";
    case ErrorCode::DuplicatePrediction: return "DuplicatePrediction";
    case ErrorCode::MalformedDataset: return "MalformedDataset";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library. `line()` is the 1-based input line for
// errors tied to a line-oriented file.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(format(code, detail, line)),
        code_(code),
        line_(line),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(ErrorCode code, const std::string& detail,
                            std::optional<std::size_t> line) {
    std::string msg(to_string(code));
    if (line) msg += " at line " + std::to_string(*line);
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::string detail_;
};

}  // namespace tkg
