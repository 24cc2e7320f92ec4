#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "firecast/geodetic.hpp"
#include "firecast/grid.hpp"
#include "firecast/patch_store.hpp"
#include "firecast/swath.hpp"

namespace firecast {

struct ResampleParams {
  int k_neighbors = 4;
  double power = 2.0;
  double radius_px = 2.0;     // IDW search radius, target pixels
  double nn_radius_px = 2.0;  // fire-mask nearest-neighbour cutoff

  void validate() const;
};

/// Inverse-distance weighting of one continuous band onto the cell's patch.
/// Each target pixel centre averages its <= k nearest non-NaN sources within
/// radius_px with weights d^-power; a source at distance 0 is returned as is;
/// no source in range gives NaN. Throws Error(band_missing).
PatchRaster idw_resample(const Swath& swath, const BandSpec& band, const GeoGrid& grid,
                         CellId cell, const ResampleParams& params);

/// Nearest-neighbour class assignment for a FIREMASK band. Ties go to the
/// lowest source index; no source within radius_px gives class 0.
PatchRaster nn_resample(const Swath& swath, const BandSpec& band, const GeoGrid& grid,
                        CellId cell, double radius_px);

/// Cuts an already-geodetic raster into RC_GEODETIC patches, one per grid
/// cell it intersects, by nearest-neighbour sampling at pixel centres.
/// Throws Error(no_overlap).
std::vector<PatchRaster> patchify_geodetic(const GeodeticRaster& raster, const GeoGrid& grid,
                                           const std::string& product);

/// Concatenates swaths of one sensor overpass (same sensor, daynight and
/// band table) into a single source set.
Swath merge_swaths(std::span<const Swath> parts);

/// Resamples every band of a swath onto every grid cell containing at least
/// one of its pixels. Bands are grouped into one patch per product.
std::vector<PatchRaster> resample_swath(const Swath& swath, const GeoGrid& grid,
                                        const ResampleParams& params);

}  // namespace firecast
