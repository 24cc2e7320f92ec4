#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "firecast/bands.hpp"

namespace firecast {

/// One band of a swath. Real-valued bands use `values` (NaN = missing);
/// FIREMASK bands use `classes` (0 = missing).
struct SwathBand {
  BandSpec spec;
  std::vector<float> values;
  std::vector<std::uint8_t> classes;
};

/// Geolocated sensor granule in sensor geometry.
struct Swath {
  std::string sensor;
  std::int64_t acquired_at = 0;  // UTC seconds
  DayNight daynight = DayNight::DAY;
  std::uint32_t n_pixels = 0;
  std::vector<float> lon;
  std::vector<float> lat;
  std::vector<SwathBand> bands;

  const SwathBand* find_band(const std::string& name) const;
};

/// Throws Error(length_mismatch) for array sizes that disagree with n_pixels
/// and Error(validation) for any other broken invariant.
void validate_swath(const Swath& s);

/// Bitwise equality (NaN payloads included).
bool bitwise_equal(const Swath& a, const Swath& b);

std::vector<std::uint8_t> encode_swath(const Swath& s);
Swath decode_swath(std::span<const std::uint8_t> bytes);

void write_swath(const std::filesystem::path& path, const Swath& s);
Swath read_swath(const std::filesystem::path& path);

inline constexpr std::uint16_t kSwathVersion = 1;

}  // namespace firecast
