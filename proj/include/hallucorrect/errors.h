#pragma once

#include <stdexcept>
#include <string>

namespace hallucorrect {

enum class ErrorCode {
  kInvalidArgument,
  kMissingBinding,
  kBackendUnavailable,
  kAuthentication,
  kQuotaExceeded,
  kTransient,
  kNetwork,
  kFixtureMissing,
  kParse,
  kConfig,
  kNotFound,
  kZeroVector,
  kDegenerateVariance,
  kEmptyInput,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Transient errors are worth retrying; everything else surfaces at once.
  bool retryable() const noexcept {
    return code_ == ErrorCode::kTransient || code_ == ErrorCode::kNetwork;
  }

 private:
  ErrorCode code_;
};

}  // namespace hallucorrect
