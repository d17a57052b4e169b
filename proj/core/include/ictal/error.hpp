#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ictal {

enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  missing_forward,
  io_error,
  bad_magic,
  unsupported_version,
  truncated_payload,
  invalid_layout,
  layout_mismatch,
  invalid_manifest,
  unknown_subject,
  config_error,
  degenerate_training_set,
  single_class,
  non_finite_loss,
  corrupt_artifact,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ictal
