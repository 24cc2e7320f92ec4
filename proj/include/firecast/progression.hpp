#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "firecast/date.hpp"
#include "firecast/grid.hpp"
#include "firecast/image.hpp"
#include "firecast/metrics.hpp"
#include "firecast/patch_store.hpp"

namespace firecast {

inline constexpr int kTrackSize = 64;

struct CellPixel {
  int col = 0;
  int row = 0;

  auto operator<=>(const CellPixel&) const = default;
};

/// One fire pixel on one day, in 64x64 cell-local coordinates.
struct Detection {
  CellId cell;
  CellPixel pixel;
  Date date;

  auto operator<=>(const Detection&) const = default;
};

/// Global pixel coordinates: x grows east, y grows south across cells.
struct GlobalPixel {
  std::int64_t x;
  std::int64_t y;

  auto operator<=>(const GlobalPixel&) const = default;
};
GlobalPixel global_pixel(const Detection& d);

struct TrackerParams {
  int max_gap_days = 2;
};

struct FireEvent {
  int id = 0;
  std::vector<Detection> detections;  // sorted
  Date ignition_date;
};

/// Connected components of the link relation: 8-adjacent or identical pixel
/// and |date difference| <= max_gap_days. Ids follow (ignition date, min y,
/// min x). Independent of input order; duplicates are collapsed.
std::vector<FireEvent> track_events(std::span<const Detection> detections,
                                    const TrackerParams& params = {});

/// Inclusive block of grid cells.
struct Region {
  int x_min = 0, x_max = 0;
  int y_min = 0, y_max = 0;

  int width() const { return (x_max - x_min + 1) * kTrackSize; }
  int height() const { return (y_max - y_min + 1) * kTrackSize; }
  bool contains(CellId c) const {
    return c.x >= x_min && c.x <= x_max && c.y >= y_min && c.y <= y_max;
  }
};

/// Smallest region covering every detection.
Region bounding_region(std::span<const FireEvent> events);

/// Days since event ignition at first detection, north-up over `region`
/// (row 0 is the north edge of cell row y_max). NaN where nothing burned.
FloatImage progression_raster(std::span<const FireEvent> events, const Region& region);

/// Splits a region raster back into 64x64 per-cell planes.
std::map<CellId, FloatImage> cell_planes(const FloatImage& raster, const Region& region);

/// Fire pixels of the daily day/night max-aggregated mask of `product`,
/// reduced to 64x64, for every cell and date in `range`.
std::vector<Detection> detections_from_store(const PatchStore& store, const std::string& product,
                                             DateRange range);

/// Day-t mask predicting day t+1 over consecutive pairs with fire on day t.
/// Throws Error(insufficient_dates) if fewer than two dates are present and
/// Error(empty_set) if no pair qualifies.
Scores persistence_stats(const PatchStore& store, const std::string& product, DateRange range);

}  // namespace firecast
