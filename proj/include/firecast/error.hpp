#pragma once

#include <stdexcept>
#include <string>

namespace firecast {

enum class ErrorCode {
  invalid_argument,
  invalid_bounds,
  outside_cell,
  bad_magic,
  version_mismatch,
  truncated_file,
  length_mismatch,
  validation,
  not_found,
  corrupt_entry,
  unknown_sensor,
  band_missing,
  no_overlap,
  invalid_ignition,
  empty_store,
  target_missing,
  shape_mismatch,
  channel_mismatch,
  empty_split,
  empty_set,
  insufficient_dates,
  unreadable_input,
  io_failure,
};

const char* to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace firecast
