#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace firecast {

/// Column/row index of a grid cell. Row y grows northward with latitude.
struct CellId {
  int x = 0;
  int y = 0;

  auto operator<=>(const CellId&) const = default;
};

enum class ResolutionClass : std::uint8_t {
  RC_1KM = 0,
  RC_750M = 1,
  RC_500M = 2,
  RC_375M = 3,
  RC_250M = 4,
  RC_GEODETIC = 5,
};

bool is_valid_resolution(std::uint8_t code);
const char* to_string(ResolutionClass rc);

/// Native patch edge length for a resolution class. The 1 km anchor is 64
/// pixels per 0.75 degree cell; the other classes keep its resolution ratio.
int patch_size_for(ResolutionClass rc);

struct LonLatBox {
  double lon_min;
  double lat_min;
  double lon_max;
  double lat_max;
};

/// Plate carree tiling of a lon/lat box into square cells. Cell (x, y) spans
/// [lon_min + x*cell_deg, lon_min + (x+1)*cell_deg) x
/// [lat_min + y*cell_deg, lat_min + (y+1)*cell_deg).
struct GeoGrid {
  double lon_min = 112.0;
  double lat_min = -44.0;
  double cell_deg = 0.75;
  int n_cols = 56;
  int n_rows = 46;

  bool contains(CellId c) const {
    return c.x >= 0 && c.x < n_cols && c.y >= 0 && c.y < n_rows;
  }
  LonLatBox cell_bounds(CellId c) const;
  /// Center of the cell in degrees (lon, lat).
  std::pair<double, double> cell_center(CellId c) const;

  bool operator==(const GeoGrid&) const = default;
};

/// Default study box: lon [112, 154], lat [-44, -10].
inline constexpr LonLatBox kAustraliaBox{112.0, -44.0, 154.0, -10.0};
inline constexpr double kDefaultCellDeg = 0.75;

/// Throws Error(invalid_bounds) unless lon_max > lon_min, lat_max > lat_min
/// and cell_deg > 0.
GeoGrid make_grid(double lon_min, double lat_min, double lon_max, double lat_max,
                  double cell_deg = kDefaultCellDeg);

std::optional<CellId> cell_of(const GeoGrid& grid, double lon, double lat);

struct PixelCoord {
  double col;
  double row;
};

/// Fractional pixel coordinates of (lon, lat) inside `cell` for a patch of
/// `patch_px` pixels; row 0 is the north edge. Throws Error(outside_cell).
PixelCoord pixel_coord(const GeoGrid& grid, CellId cell, double lon, double lat,
                       int patch_px);

/// Same affine map without the containment check, for points near a cell.
PixelCoord pixel_coord_unchecked(const GeoGrid& grid, CellId cell, double lon,
                                 double lat, int patch_px);

std::string cell_name(CellId c);  // "x_y"

}  // namespace firecast
