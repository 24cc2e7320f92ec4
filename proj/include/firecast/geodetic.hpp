#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "firecast/bands.hpp"
#include "firecast/date.hpp"

namespace firecast {

/// Regular lon/lat raster (weather, drought). Pixel (r, c) covers
/// [lon_west + c*dlon, +dlon) x (lat_north - (r+1)*dlat, lat_north - r*dlat].
struct GeodeticRaster {
  BandSpec band;
  Date date;
  double lon_west = 0;
  double lat_north = 0;
  double dlon = 0;
  double dlat = 0;
  int width = 0;
  int height = 0;
  std::vector<float> values;  // row-major, NaN = nodata

  float at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

std::vector<std::uint8_t> encode_geodetic(const GeodeticRaster& r);
GeodeticRaster decode_geodetic(std::span<const std::uint8_t> bytes);
void write_geodetic(const std::filesystem::path& path, const GeodeticRaster& r);
GeodeticRaster read_geodetic(const std::filesystem::path& path);

}  // namespace firecast
