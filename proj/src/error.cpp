#include "firecast/error.hpp"

namespace firecast {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_bounds: return "invalid-bounds";
    case ErrorCode::outside_cell: return "outside-cell";
    case ErrorCode::bad_magic: return "bad-magic";
    case ErrorCode::version_mismatch: return "version-mismatch";
    case ErrorCode::truncated_file: return "truncated-file";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::validation: return "validation";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::corrupt_entry: return "corrupt-entry";
    case ErrorCode::unknown_sensor: return "unknown-sensor";
    case ErrorCode::band_missing: return "band-missing";
    case ErrorCode::no_overlap: return "no-overlap";
    case ErrorCode::invalid_ignition: return "invalid-ignition";
    case ErrorCode::empty_store: return "empty-store";
    case ErrorCode::target_missing: return "target-missing";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::channel_mismatch: return "channel-mismatch";
    case ErrorCode::empty_split: return "empty-split";
    case ErrorCode::empty_set: return "empty-set";
    case ErrorCode::insufficient_dates: return "insufficient-dates";
    case ErrorCode::unreadable_input: return "unreadable-input";
    case ErrorCode::io_failure: return "io-failure";
  }
  return "unknown";
}

}  // namespace firecast
