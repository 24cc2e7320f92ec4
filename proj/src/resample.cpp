#include "firecast/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "firecast/date.hpp"
#include "firecast/error.hpp"

namespace firecast {
namespace {

struct Candidate {
  double d2;
  std::uint32_t index;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

/// Source points in target-pixel coordinates, bucketed on a 1-pixel grid.
class BucketIndex {
 public:
  BucketIndex(const Swath& swath, std::span<const std::uint32_t> subset, const GeoGrid& grid,
              CellId cell, int patch_px, double radius, std::span<const float> values)
      : radius_(radius), margin_(static_cast<int>(std::ceil(radius)) + 1),
        side_(patch_px + 2 * margin_) {
    std::vector<std::uint32_t> bucket_of;
    auto consider = [&](std::uint32_t i) {
      if (!values.empty() && std::isnan(values[i])) return;
      const PixelCoord pc = pixel_coord_unchecked(grid, cell, swath.lon[i], swath.lat[i], patch_px);
      if (!(pc.col >= -radius && pc.col <= patch_px + radius && pc.row >= -radius &&
            pc.row <= patch_px + radius))
        return;
      const int bx = static_cast<int>(std::floor(pc.col)) + margin_;
      const int by = static_cast<int>(std::floor(pc.row)) + margin_;
      if (bx < 0 || by < 0 || bx >= side_ || by >= side_) return;
      col_.push_back(pc.col);
      row_.push_back(pc.row);
      src_.push_back(i);
      bucket_of.push_back(static_cast<std::uint32_t>(by * side_ + bx));
    };
    if (subset.empty())
      for (std::uint32_t i = 0; i < swath.n_pixels; ++i) consider(i);
    else
      for (std::uint32_t i : subset) consider(i);

    // Counting sort by bucket so each bucket's points are contiguous.
    start_.assign(static_cast<std::size_t>(side_) * side_ + 1, 0);
    for (auto b : bucket_of) ++start_[b + 1];
    for (std::size_t b = 1; b < start_.size(); ++b) start_[b] += start_[b - 1];
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    std::vector<double> col(col_.size()), row(row_.size());
    std::vector<std::uint32_t> src(src_.size());
    for (std::size_t p = 0; p < bucket_of.size(); ++p) {
      const std::uint32_t k = fill[bucket_of[p]]++;
      col[k] = col_[p];
      row[k] = row_[p];
      src[k] = src_[p];
    }
    col_.swap(col);
    row_.swap(row);
    src_.swap(src);
  }

  /// Sources within radius of (cx, cy), as (squared distance, local point id).
  void query(double cx, double cy, std::vector<Candidate>& out) const {
    out.clear();
    const int bx0 = std::max(0, static_cast<int>(std::floor(cx - radius_)) + margin_);
    const int bx1 = std::min(side_ - 1, static_cast<int>(std::floor(cx + radius_)) + margin_);
    const int by0 = std::max(0, static_cast<int>(std::floor(cy - radius_)) + margin_);
    const int by1 = std::min(side_ - 1, static_cast<int>(std::floor(cy + radius_)) + margin_);
    const double r2 = radius_ * radius_;
    for (int by = by0; by <= by1; ++by)
      for (int bx = bx0; bx <= bx1; ++bx) {
        const std::size_t b = static_cast<std::size_t>(by) * side_ + bx;
        for (std::uint32_t k = start_[b]; k < start_[b + 1]; ++k) {
          const double dx = col_[k] - cx;
          const double dy = row_[k] - cy;
          const double d2 = dx * dx + dy * dy;
          if (d2 <= r2) out.push_back({d2, src_[k]});
        }
      }
  }

 private:
  double radius_;
  int margin_;
  int side_;
  std::vector<double> col_, row_;
  std::vector<std::uint32_t> src_;
  std::vector<std::uint32_t> start_;
};

const SwathBand& require_band(const Swath& swath, const BandSpec& band) {
  const SwathBand* b = swath.find_band(band.name);
  if (!b) throw Error(ErrorCode::band_missing, "swath lacks band " + band.name);
  return *b;
}

PatchRaster blank_patch(const Swath& swath, const SwathBand& band, const GeoGrid& grid,
                        CellId cell) {
  PatchRaster p;
  p.product = product_for(swath.sensor, band.spec);
  p.cell = cell;
  p.date = local_date(swath.acquired_at, grid.cell_center(cell).first);
  p.daynight = swath.daynight;
  p.size = patch_size_for(band.spec.resolution);
  p.channels = {band.spec};
  p.data.assign(static_cast<std::size_t>(p.size) * p.size, 0.0f);
  return p;
}

PatchRaster idw_impl(const Swath& swath, const SwathBand& band, const GeoGrid& grid, CellId cell,
                     const ResampleParams& params, std::span<const std::uint32_t> subset) {
  if (band.spec.kind == BandKind::FIREMASK)
    throw Error(ErrorCode::invalid_argument, "IDW applies to continuous bands only");
  PatchRaster p = blank_patch(swath, band, grid, cell);
  const BucketIndex index(swath, subset, grid, cell, p.size, params.radius_px, band.values);
  const std::size_t k = static_cast<std::size_t>(params.k_neighbors);
  std::vector<Candidate> cand;
  for (int r = 0; r < p.size; ++r)
    for (int c = 0; c < p.size; ++c) {
      index.query(c + 0.5, r + 0.5, cand);
      float out = std::numeric_limits<float>::quiet_NaN();
      if (!cand.empty()) {
        const std::size_t take = std::min(k, cand.size());
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
        if (cand[0].d2 == 0.0) {
          // Coincident sources: exact interpolation, averaged if several.
          double sum = 0;
          int n = 0;
          for (std::size_t i = 0; i < take && cand[i].d2 == 0.0; ++i, ++n)
            sum += band.values[cand[i].index];
          out = static_cast<float>(sum / n);
        } else {
          double num = 0, den = 0;
          for (std::size_t i = 0; i < take; ++i) {
            const double w = params.power == 2.0 ? 1.0 / cand[i].d2
                                                 : std::pow(cand[i].d2, -0.5 * params.power);
            num += w * band.values[cand[i].index];
            den += w;
          }
          out = static_cast<float>(num / den);
        }
      }
      p.at(0, r, c) = out;
    }
  return p;
}

PatchRaster nn_impl(const Swath& swath, const SwathBand& band, const GeoGrid& grid, CellId cell,
                    double radius_px, std::span<const std::uint32_t> subset) {
  if (band.spec.kind != BandKind::FIREMASK)
    throw Error(ErrorCode::invalid_argument, "nearest-neighbour resampling expects a fire mask");
  PatchRaster p = blank_patch(swath, band, grid, cell);
  const BucketIndex index(swath, subset, grid, cell, p.size, radius_px, {});
  std::vector<Candidate> cand;
  for (int r = 0; r < p.size; ++r)
    for (int c = 0; c < p.size; ++c) {
      index.query(c + 0.5, r + 0.5, cand);
      std::uint8_t cls = kClassMissing;
      if (!cand.empty()) cls = band.classes[std::min_element(cand.begin(), cand.end())->index];
      p.at(0, r, c) = static_cast<float>(cls);
    }
  return p;
}

}  // namespace

void ResampleParams::validate() const {
  if (k_neighbors < 1 || !(power > 0) || !(radius_px > 0) || !(nn_radius_px > 0))
    throw Error(ErrorCode::invalid_argument, "resample parameters must be positive");
}

PatchRaster idw_resample(const Swath& swath, const BandSpec& band, const GeoGrid& grid,
                         CellId cell, const ResampleParams& params) {
  params.validate();
  return idw_impl(swath, require_band(swath, band), grid, cell, params, {});
}

PatchRaster nn_resample(const Swath& swath, const BandSpec& band, const GeoGrid& grid,
                        CellId cell, double radius_px) {
  if (!(radius_px > 0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");
  return nn_impl(swath, require_band(swath, band), grid, cell, radius_px, {});
}

std::vector<PatchRaster> patchify_geodetic(const GeodeticRaster& raster, const GeoGrid& grid,
                                           const std::string& product) {
  const double east = raster.lon_west + raster.width * raster.dlon;
  const double south = raster.lat_north - raster.height * raster.dlat;
  const int px = patch_size_for(ResolutionClass::RC_GEODETIC);
  std::vector<PatchRaster> out;
  for (int y = 0; y < grid.n_rows; ++y)
    for (int x = 0; x < grid.n_cols; ++x) {
      const CellId cell{x, y};
      const LonLatBox b = grid.cell_bounds(cell);
      if (!(b.lon_max > raster.lon_west && b.lon_min < east && b.lat_max > south &&
            b.lat_min < raster.lat_north))
        continue;
      PatchRaster p;
      p.product = product;
      p.cell = cell;
      p.date = raster.date;
      p.daynight = DayNight::DAY;
      p.size = px;
      BandSpec band = raster.band;
      band.resolution = ResolutionClass::RC_GEODETIC;
      p.channels = {band};
      p.data.assign(static_cast<std::size_t>(px) * px, std::numeric_limits<float>::quiet_NaN());
      for (int r = 0; r < px; ++r) {
        const double lat = b.lat_max - (r + 0.5) * grid.cell_deg / px;
        const double fr = std::floor((raster.lat_north - lat) / raster.dlat);
        if (fr < 0 || fr >= raster.height) continue;
        for (int c = 0; c < px; ++c) {
          const double lon = b.lon_min + (c + 0.5) * grid.cell_deg / px;
          const double fc = std::floor((lon - raster.lon_west) / raster.dlon);
          if (fc < 0 || fc >= raster.width) continue;
          p.at(0, r, c) = raster.at(static_cast<int>(fr), static_cast<int>(fc));
        }
      }
      out.push_back(std::move(p));
    }
  if (out.empty())
    throw Error(ErrorCode::no_overlap, "geodetic raster " + raster.band.name +
                                           " does not intersect the grid");
  return out;
}

Swath merge_swaths(std::span<const Swath> parts) {
  if (parts.empty()) throw Error(ErrorCode::invalid_argument, "nothing to merge");
  Swath out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const Swath& s = parts[i];
    if (s.sensor != out.sensor || s.daynight != out.daynight || s.bands.size() != out.bands.size())
      throw Error(ErrorCode::validation, "swaths of different overpasses cannot be merged");
    for (std::size_t b = 0; b < s.bands.size(); ++b) {
      if (!(s.bands[b].spec == out.bands[b].spec))
        throw Error(ErrorCode::validation, "swath band tables differ");
      auto& dst = out.bands[b];
      dst.values.insert(dst.values.end(), s.bands[b].values.begin(), s.bands[b].values.end());
      dst.classes.insert(dst.classes.end(), s.bands[b].classes.begin(), s.bands[b].classes.end());
    }
    out.lon.insert(out.lon.end(), s.lon.begin(), s.lon.end());
    out.lat.insert(out.lat.end(), s.lat.begin(), s.lat.end());
    out.n_pixels += s.n_pixels;
    out.acquired_at = std::min(out.acquired_at, s.acquired_at);
  }
  return out;
}

std::vector<PatchRaster> resample_swath(const Swath& swath, const GeoGrid& grid,
                                        const ResampleParams& params) {
  params.validate();
  validate_swath(swath);
  // Candidate source pixels per cell, including a margin for pixels in
  // neighbouring cells that fall within the search radius.
  double margin_px = std::max(params.radius_px, params.nn_radius_px);
  int min_patch = 1 << 30;
  for (const auto& b : swath.bands) min_patch = std::min(min_patch, patch_size_for(b.spec.resolution));
  const double margin = margin_px / min_patch;  // in cell units
  std::map<CellId, std::vector<std::uint32_t>> members;
  std::set<CellId> owners;
  for (std::uint32_t i = 0; i < swath.n_pixels; ++i) {
    const double fx = (swath.lon[i] - grid.lon_min) / grid.cell_deg;
    const double fy = (swath.lat[i] - grid.lat_min) / grid.cell_deg;
    if (auto c = cell_of(grid, swath.lon[i], swath.lat[i])) owners.insert(*c);
    const int x0 = static_cast<int>(std::floor(fx - margin));
    const int x1 = static_cast<int>(std::floor(fx + margin));
    const int y0 = static_cast<int>(std::floor(fy - margin));
    const int y1 = static_cast<int>(std::floor(fy + margin));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (grid.contains({x, y})) members[{x, y}].push_back(i);
  }
  std::vector<PatchRaster> out;
  for (CellId cell : owners) {
    const auto& subset = members[cell];
    std::map<std::string, PatchRaster> by_product;
    std::vector<std::string> order;
    for (const auto& band : swath.bands) {
      PatchRaster p = band.spec.kind == BandKind::FIREMASK
                          ? nn_impl(swath, band, grid, cell, params.nn_radius_px, subset)
                          : idw_impl(swath, band, grid, cell, params, subset);
      auto it = by_product.find(p.product);
      if (it == by_product.end()) {
        order.push_back(p.product);
        by_product.emplace(p.product, std::move(p));
      } else {
        it->second.channels.push_back(band.spec);
        it->second.data.insert(it->second.data.end(), p.data.begin(), p.data.end());
      }
    }
    for (const auto& name : order) out.push_back(std::move(by_product.at(name)));
  }
  return out;
}

}  // namespace firecast
