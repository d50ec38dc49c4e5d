#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rasl {

enum class ErrorCode {
  kZeroTranslation,
  kDegenerateMatrix,
  kNearPiSingularity,
  kEmptyInput,
  kInsufficientRegions,
  kDegenerateConfiguration,
  kCheiralityAmbiguity,
  kNoValidHypothesis,
  kDisconnectedGraph,
  kNonConvergence,
  kParallelDirections,
  kInsufficientConstraints,
  kInvalidSpec,
  kNoOverlap,
  kInvalidArgument,
  kParseError,
  kIoError,
  kInvalidConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as rasl::Error; code() lets callers branch
// on the failure kind (e.g. falling back when kNoValidHypothesis is raised).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rasl
