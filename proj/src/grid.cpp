#include "firecast/grid.hpp"

#include <cmath>

#include "firecast/error.hpp"

namespace firecast {

bool is_valid_resolution(std::uint8_t code) { return code <= 5; }

const char* to_string(ResolutionClass rc) {
  switch (rc) {
    case ResolutionClass::RC_1KM: return "1km";
    case ResolutionClass::RC_750M: return "750m";
    case ResolutionClass::RC_500M: return "500m";
    case ResolutionClass::RC_375M: return "375m";
    case ResolutionClass::RC_250M: return "250m";
    case ResolutionClass::RC_GEODETIC: return "geodetic";
  }
  return "?";
}

int patch_size_for(ResolutionClass rc) {
  switch (rc) {
    case ResolutionClass::RC_1KM: return 64;
    case ResolutionClass::RC_750M: return 96;
    case ResolutionClass::RC_500M: return 128;
    case ResolutionClass::RC_375M: return 192;
    case ResolutionClass::RC_250M: return 256;
    case ResolutionClass::RC_GEODETIC: return 64;
  }
  return 0;
}

GeoGrid make_grid(double lon_min, double lat_min, double lon_max, double lat_max,
                  double cell_deg) {
  const bool finite = std::isfinite(lon_min) && std::isfinite(lat_min) &&
                      std::isfinite(lon_max) && std::isfinite(lat_max) &&
                      std::isfinite(cell_deg);
  if (!finite || !(lon_max > lon_min) || !(lat_max > lat_min) || !(cell_deg > 0))
    throw Error(ErrorCode::invalid_bounds, "grid bounds must be increasing and cell_deg > 0");
  GeoGrid g;
  g.lon_min = lon_min;
  g.lat_min = lat_min;
  g.cell_deg = cell_deg;
  g.n_cols = static_cast<int>(std::ceil((lon_max - lon_min) / cell_deg));
  g.n_rows = static_cast<int>(std::ceil((lat_max - lat_min) / cell_deg));
  return g;
}

LonLatBox GeoGrid::cell_bounds(CellId c) const {
  return {lon_min + c.x * cell_deg, lat_min + c.y * cell_deg,
          lon_min + (c.x + 1) * cell_deg, lat_min + (c.y + 1) * cell_deg};
}

std::pair<double, double> GeoGrid::cell_center(CellId c) const {
  return {lon_min + (c.x + 0.5) * cell_deg, lat_min + (c.y + 0.5) * cell_deg};
}

std::optional<CellId> cell_of(const GeoGrid& grid, double lon, double lat) {
  if (!std::isfinite(lon) || !std::isfinite(lat)) return std::nullopt;
  const double fx = std::floor((lon - grid.lon_min) / grid.cell_deg);
  const double fy = std::floor((lat - grid.lat_min) / grid.cell_deg);
  if (fx < 0 || fy < 0 || fx >= grid.n_cols || fy >= grid.n_rows) return std::nullopt;
  CellId c{static_cast<int>(fx), static_cast<int>(fy)};
  // The division can round across a boundary; settle it against the
  // half-open span computed the same way cell_bounds does.
  const LonLatBox b = grid.cell_bounds(c);
  if (lon < b.lon_min) --c.x;
  else if (lon >= b.lon_max) ++c.x;
  if (lat < b.lat_min) --c.y;
  else if (lat >= b.lat_max) ++c.y;
  if (!grid.contains(c)) return std::nullopt;
  return c;
}

PixelCoord pixel_coord_unchecked(const GeoGrid& grid, CellId cell, double lon,
                                 double lat, int patch_px) {
  const LonLatBox b = grid.cell_bounds(cell);
  return {patch_px * (lon - b.lon_min) / grid.cell_deg,
          patch_px * (b.lat_max - lat) / grid.cell_deg};
}

PixelCoord pixel_coord(const GeoGrid& grid, CellId cell, double lon, double lat,
                       int patch_px) {
  const LonLatBox b = grid.cell_bounds(cell);
  if (!(lon >= b.lon_min && lon < b.lon_max && lat >= b.lat_min && lat < b.lat_max))
    throw Error(ErrorCode::outside_cell, "point outside cell " + cell_name(cell));
  return pixel_coord_unchecked(grid, cell, lon, lat, patch_px);
}

std::string cell_name(CellId c) { return std::to_string(c.x) + "_" + std::to_string(c.y); }

}  // namespace firecast
