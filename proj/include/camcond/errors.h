#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace camcond {

enum class ErrorCode {
  kAngleNearPi,
  kDegenerateBasis,
  kBehindCamera,
  kUndistortDiverged,
  kBadLayout,
  kNonFinite,
  kNotPositiveDefinite,
  kDimensionMismatch,
  kEmptyPointSet,
  kNonFiniteGradient,
  kInsufficientVisibility,
  kInvalidArgument,
  kConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

  // Config errors are user input problems; everything else is numeric.
  bool is_config_error() const {
    return code_ == ErrorCode::kConfig || code_ == ErrorCode::kInvalidArgument;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace camcond
