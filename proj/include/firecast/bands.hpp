#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "firecast/grid.hpp"

namespace firecast {

enum class BandKind : std::uint8_t {
  REFLECTIVE = 0,
  EMISSIVE = 1,
  FIREMASK = 2,
  WEATHER = 3,
  DROUGHT = 4,
};

enum class DayNight : std::uint8_t { DAY = 0, NIGHT = 1 };

const char* to_string(BandKind k);
const char* to_string(DayNight dn);
char daynight_letter(DayNight dn);  // 'D' or 'N'

struct BandSpec {
  std::string name;
  ResolutionClass resolution = ResolutionClass::RC_1KM;
  BandKind kind = BandKind::EMISSIVE;

  bool operator==(const BandSpec&) const = default;
};

inline constexpr std::string_view kModis = "MODIS";
inline constexpr std::string_view kViirs = "VIIRS";

/// Sensor bands available for an overpass. Night overpasses carry only the
/// emissive bands. Throws Error(unknown_sensor).
std::vector<BandSpec> band_manifest(std::string_view sensor, DayNight dn);

/// The fire-mask layer of a sensor ("FireMask" at the detection resolution).
BandSpec fire_mask_band(std::string_view sensor);

/// Daily reanalysis weather variables and the drought index, both geodetic.
std::vector<BandSpec> weather_bands();
BandSpec drought_band();

/// Product identifier that stores `band` from `sensor` in the patch store,
/// e.g. MOD021KM, VNP02IMG, MOD14, VNP14IMG, ERA5, KBDI.
std::string product_for(std::string_view sensor, const BandSpec& band);
std::string fire_product(std::string_view sensor);

/// Local overpass time in hours for the sensor's platform.
double overpass_local_hour(std::string_view sensor, DayNight dn);

/// Fire-mask binarization: low, nominal and high confidence fire (7, 8, 9).
constexpr bool is_fire(std::uint8_t code) { return code >= 7 && code <= 9; }
inline bool is_fire_value(float code) { return code >= 6.5f && code <= 9.5f; }

inline constexpr std::uint8_t kClassMissing = 0;
inline constexpr std::uint8_t kClassNonFireLand = 5;
inline constexpr std::uint8_t kClassFireLow = 7;
inline constexpr std::uint8_t kClassFireNominal = 8;
inline constexpr std::uint8_t kClassFireHigh = 9;

}  // namespace firecast
