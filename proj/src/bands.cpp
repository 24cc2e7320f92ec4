#include "firecast/bands.hpp"

#include "firecast/error.hpp"

namespace firecast {
namespace {

using RC = ResolutionClass;

BandSpec band(std::string name, RC rc, BandKind kind) { return {std::move(name), rc, kind}; }

std::vector<BandSpec> modis_bands(DayNight dn) {
  std::vector<BandSpec> out;
  for (int b = 1; b <= 36; ++b) {
    const bool emissive = (b >= 20 && b <= 25) || b >= 27;
    if (dn == DayNight::NIGHT && !emissive) continue;
    RC rc = RC::RC_1KM;
    if (b <= 2) rc = RC::RC_250M;
    else if (b <= 7) rc = RC::RC_500M;
    out.push_back(band("B" + std::to_string(b), rc,
                       emissive ? BandKind::EMISSIVE : BandKind::REFLECTIVE));
  }
  return out;
}

std::vector<BandSpec> viirs_bands(DayNight dn) {
  std::vector<BandSpec> out;
  for (int b = 1; b <= 5; ++b) {
    const bool emissive = b >= 4;
    if (dn == DayNight::NIGHT && !emissive) continue;
    out.push_back(band("I" + std::to_string(b), RC::RC_375M,
                       emissive ? BandKind::EMISSIVE : BandKind::REFLECTIVE));
  }
  for (int b = 1; b <= 16; ++b) {
    const bool emissive = b == 7 || b == 8 || b >= 10;
    if (dn == DayNight::NIGHT && !emissive) continue;
    std::string name = (b < 10 ? "M0" : "M") + std::to_string(b);
    out.push_back(band(std::move(name), RC::RC_750M,
                       emissive ? BandKind::EMISSIVE : BandKind::REFLECTIVE));
  }
  return out;
}

[[noreturn]] void unknown(std::string_view sensor) {
  throw Error(ErrorCode::unknown_sensor, "unknown sensor '" + std::string(sensor) + "'");
}

}  // namespace

const char* to_string(BandKind k) {
  switch (k) {
    case BandKind::REFLECTIVE: return "REFLECTIVE";
    case BandKind::EMISSIVE: return "EMISSIVE";
    case BandKind::FIREMASK: return "FIREMASK";
    case BandKind::WEATHER: return "WEATHER";
    case BandKind::DROUGHT: return "DROUGHT";
  }
  return "?";
}

const char* to_string(DayNight dn) { return dn == DayNight::DAY ? "DAY" : "NIGHT"; }
char daynight_letter(DayNight dn) { return dn == DayNight::DAY ? 'D' : 'N'; }

std::vector<BandSpec> band_manifest(std::string_view sensor, DayNight dn) {
  if (sensor == kModis) return modis_bands(dn);
  if (sensor == kViirs) return viirs_bands(dn);
  unknown(sensor);
}

BandSpec fire_mask_band(std::string_view sensor) {
  if (sensor == kModis) return band("FireMask", RC::RC_1KM, BandKind::FIREMASK);
  if (sensor == kViirs) return band("FireMask", RC::RC_375M, BandKind::FIREMASK);
  unknown(sensor);
}

std::vector<BandSpec> weather_bands() {
  std::vector<BandSpec> out;
  for (const char* n : {"t2m", "d2m", "u10", "v10", "tp", "sp", "swvl1", "ssrd"})
    out.push_back(band(n, RC::RC_GEODETIC, BandKind::WEATHER));
  return out;
}

BandSpec drought_band() { return band("kbdi", RC::RC_GEODETIC, BandKind::DROUGHT); }

std::string product_for(std::string_view sensor, const BandSpec& b) {
  if (b.kind == BandKind::WEATHER) return "ERA5";
  if (b.kind == BandKind::DROUGHT) return "KBDI";
  if (b.kind == BandKind::FIREMASK) return fire_product(sensor);
  if (sensor == kModis) {
    switch (b.resolution) {
      case RC::RC_250M: return "MOD02QKM";
      case RC::RC_500M: return "MOD02HKM";
      default: return "MOD021KM";
    }
  }
  if (sensor == kViirs) return b.resolution == RC::RC_375M ? "VNP02IMG" : "VNP02MOD";
  unknown(sensor);
}

std::string fire_product(std::string_view sensor) {
  if (sensor == kModis) return "MOD14";
  if (sensor == kViirs) return "VNP14IMG";
  unknown(sensor);
}

double overpass_local_hour(std::string_view sensor, DayNight dn) {
  // Terra 10:30 / 22:30, S-NPP 13:30 / 01:30.
  if (sensor == kModis) return dn == DayNight::DAY ? 10.5 : 22.5;
  if (sensor == kViirs) return dn == DayNight::DAY ? 13.5 : 1.5;
  unknown(sensor);
}

}  // namespace firecast
