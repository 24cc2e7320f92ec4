#include "firecast/geodetic.hpp"

#include <cmath>

#include "firecast/binio.hpp"
#include "firecast/error.hpp"

namespace firecast {
namespace {
constexpr char kMagic[5] = "GEO1";
constexpr std::uint16_t kVersion = 1;

void check(const GeodeticRaster& r) {
  if (r.width <= 0 || r.height <= 0 ||
      r.values.size() != static_cast<std::size_t>(r.width) * r.height)
    throw Error(ErrorCode::length_mismatch, "geodetic raster payload size");
  if (!(r.dlon > 0) || !(r.dlat > 0) || !std::isfinite(r.lon_west) || !std::isfinite(r.lat_north))
    throw Error(ErrorCode::validation, "geodetic raster georeference");
}
}  // namespace

std::vector<std::uint8_t> encode_geodetic(const GeodeticRaster& r) {
  check(r);
  binio::Writer w;
  w.magic(kMagic);
  w.u16(kVersion);
  w.str(r.band.name);
  w.u8(static_cast<std::uint8_t>(r.band.resolution));
  w.u8(static_cast<std::uint8_t>(r.band.kind));
  w.str(r.date.iso());
  w.f64(r.lon_west);
  w.f64(r.lat_north);
  w.f64(r.dlon);
  w.f64(r.dlat);
  w.u32(static_cast<std::uint32_t>(r.width));
  w.u32(static_cast<std::uint32_t>(r.height));
  w.f32s(r.values);
  return std::move(w.buffer());
}

GeodeticRaster decode_geodetic(std::span<const std::uint8_t> bytes) {
  binio::Reader rd(bytes);
  if (bytes.size() < 4 || !rd.magic(kMagic))
    throw Error(ErrorCode::bad_magic, "not a geodetic raster");
  if (rd.u16() != kVersion) throw Error(ErrorCode::version_mismatch, "geodetic raster version");
  GeodeticRaster r;
  r.band.name = rd.str();
  const std::uint8_t rc = rd.u8();
  const std::uint8_t kind = rd.u8();
  if (!is_valid_resolution(rc) || kind > 4)
    throw Error(ErrorCode::validation, "geodetic raster band table");
  r.band.resolution = static_cast<ResolutionClass>(rc);
  r.band.kind = static_cast<BandKind>(kind);
  r.date = Date::parse(rd.str());
  r.lon_west = rd.f64();
  r.lat_north = rd.f64();
  r.dlon = rd.f64();
  r.dlat = rd.f64();
  r.width = static_cast<int>(rd.u32());
  r.height = static_cast<int>(rd.u32());
  const std::size_t n = static_cast<std::size_t>(r.width) * r.height;
  if (rd.remaining() != n * 4)
    throw Error(rd.remaining() < n * 4 ? ErrorCode::truncated_file : ErrorCode::length_mismatch,
                "geodetic raster payload");
  r.values.resize(n);
  rd.f32s(r.values);
  check(r);
  return r;
}

void write_geodetic(const std::filesystem::path& path, const GeodeticRaster& r) {
  binio::write_file_atomic(path, encode_geodetic(r));
}

GeodeticRaster read_geodetic(const std::filesystem::path& path) {
  return decode_geodetic(binio::read_file(path));
}

}  // namespace firecast
