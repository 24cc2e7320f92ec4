#include "firecast/swath.hpp"

#include <cmath>
#include <cstring>
#include <set>

#include "firecast/binio.hpp"
#include "firecast/error.hpp"

namespace firecast {
namespace {

constexpr char kMagic[5] = "SWT1";

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::validation, "invalid swath: " + what);
}

bool same_bits(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

}  // namespace

const SwathBand* Swath::find_band(const std::string& name) const {
  for (const auto& b : bands)
    if (b.spec.name == name) return &b;
  return nullptr;
}

void validate_swath(const Swath& s) {
  const std::size_t n = s.n_pixels;
  if (s.lon.size() != n || s.lat.size() != n)
    throw Error(ErrorCode::length_mismatch, "coordinate arrays disagree with n_pixels");
  for (const auto& b : s.bands) {
    const bool mask = b.spec.kind == BandKind::FIREMASK;
    if ((mask ? b.classes.size() : b.values.size()) != n ||
        (mask ? !b.values.empty() : !b.classes.empty()))
      throw Error(ErrorCode::length_mismatch, "band " + b.spec.name + " disagrees with n_pixels");
  }
  if (s.sensor.empty()) invalid("empty sensor name");
  if (s.bands.size() > 0xFFFF) invalid("too many bands");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.lat[i] >= -90.0f && s.lat[i] <= 90.0f)) invalid("latitude out of range");
    if (!(s.lon[i] >= -180.0f && s.lon[i] <= 180.0f)) invalid("longitude out of range");
  }
  std::set<std::string> names;
  for (const auto& b : s.bands) {
    if (!names.insert(b.spec.name).second) invalid("duplicate band " + b.spec.name);
    if (s.daynight == DayNight::NIGHT && b.spec.kind == BandKind::REFLECTIVE)
      invalid("night swath carries reflective band " + b.spec.name);
    if (b.spec.kind == BandKind::FIREMASK)
      for (std::uint8_t c : b.classes)
        if (c > 9) invalid("fire-mask class code " + std::to_string(c));
  }
}

bool bitwise_equal(const Swath& a, const Swath& b) {
  if (a.sensor != b.sensor || a.acquired_at != b.acquired_at || a.daynight != b.daynight ||
      a.n_pixels != b.n_pixels || a.bands.size() != b.bands.size())
    return false;
  if (!same_bits(a.lon, b.lon) || !same_bits(a.lat, b.lat)) return false;
  for (std::size_t i = 0; i < a.bands.size(); ++i) {
    const auto& x = a.bands[i];
    const auto& y = b.bands[i];
    if (!(x.spec == y.spec) || x.classes != y.classes || !same_bits(x.values, y.values))
      return false;
  }
  return true;
}

std::vector<std::uint8_t> encode_swath(const Swath& s) {
  validate_swath(s);
  binio::Writer w;
  w.magic(kMagic);
  w.u16(kSwathVersion);
  w.str(s.sensor);
  w.i64(s.acquired_at);
  w.u8(static_cast<std::uint8_t>(s.daynight));
  w.u32(s.n_pixels);
  w.u16(static_cast<std::uint16_t>(s.bands.size()));
  for (const auto& b : s.bands) {
    w.str(b.spec.name);
    w.u8(static_cast<std::uint8_t>(b.spec.resolution));
    w.u8(static_cast<std::uint8_t>(b.spec.kind));
  }
  w.f32s(s.lat);
  w.f32s(s.lon);
  for (const auto& b : s.bands) {
    if (b.spec.kind == BandKind::FIREMASK) w.bytes(b.classes);
    else w.f32s(b.values);
  }
  return std::move(w.buffer());
}

Swath decode_swath(std::span<const std::uint8_t> bytes) {
  binio::Reader r(bytes);
  if (bytes.size() < 4 || !r.magic(kMagic))
    throw Error(ErrorCode::bad_magic, "not a swath file (magic)");
  const std::uint16_t version = r.u16();
  if (version != kSwathVersion)
    throw Error(ErrorCode::version_mismatch, "swath version " + std::to_string(version));
  Swath s;
  s.sensor = r.str();
  s.acquired_at = r.i64();
  const std::uint8_t dn = r.u8();
  if (dn > 1) invalid("daynight code " + std::to_string(dn));
  s.daynight = static_cast<DayNight>(dn);
  s.n_pixels = r.u32();
  const std::uint16_t n_bands = r.u16();
  for (std::uint16_t i = 0; i < n_bands; ++i) {
    SwathBand b;
    b.spec.name = r.str();
    const std::uint8_t rc = r.u8();
    const std::uint8_t kind = r.u8();
    if (!is_valid_resolution(rc)) invalid("resolution code " + std::to_string(rc));
    if (kind > 4) invalid("band kind code " + std::to_string(kind));
    b.spec.resolution = static_cast<ResolutionClass>(rc);
    b.spec.kind = static_cast<BandKind>(kind);
    s.bands.push_back(std::move(b));
  }
  // The payload size is fully determined by the header.
  std::size_t payload = std::size_t{8} * s.n_pixels;
  for (const auto& b : s.bands)
    payload += (b.spec.kind == BandKind::FIREMASK ? 1 : 4) * std::size_t{s.n_pixels};
  if (r.remaining() < payload)
    throw Error(ErrorCode::truncated_file, "swath payload shorter than header declares");
  if (r.remaining() > payload)
    throw Error(ErrorCode::length_mismatch, "swath payload longer than header declares");
  s.lat.resize(s.n_pixels);
  s.lon.resize(s.n_pixels);
  r.f32s(s.lat);
  r.f32s(s.lon);
  for (auto& b : s.bands) {
    if (b.spec.kind == BandKind::FIREMASK) {
      b.classes.resize(s.n_pixels);
      r.bytes(b.classes);
    } else {
      b.values.resize(s.n_pixels);
      r.f32s(b.values);
    }
  }
  validate_swath(s);
  return s;
}

void write_swath(const std::filesystem::path& path, const Swath& s) {
  const auto bytes = encode_swath(s);
  binio::write_file_atomic(path, bytes);
}

Swath read_swath(const std::filesystem::path& path) {
  return decode_swath(binio::read_file(path));
}

}  // namespace firecast
