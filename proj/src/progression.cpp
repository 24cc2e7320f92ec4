#include "firecast/progression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "firecast/dataset.hpp"
#include "firecast/error.hpp"

namespace firecast {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct PixelHash {
  std::size_t operator()(const GlobalPixel& p) const {
    return std::hash<std::int64_t>()(p.x * 0x9E3779B97F4A7C15ll ^ p.y);
  }
};

}  // namespace

GlobalPixel global_pixel(const Detection& d) {
  return {static_cast<std::int64_t>(d.cell.x) * kTrackSize + d.pixel.col,
          -static_cast<std::int64_t>(d.cell.y) * kTrackSize + d.pixel.row};
}

std::vector<FireEvent> track_events(std::span<const Detection> detections,
                                    const TrackerParams& params) {
  if (params.max_gap_days < 0) throw Error(ErrorCode::invalid_argument, "max_gap_days must be >= 0");
  std::vector<Detection> dets(detections.begin(), detections.end());
  std::sort(dets.begin(), dets.end());
  dets.erase(std::unique(dets.begin(), dets.end()), dets.end());
  for (const Detection& d : dets)
    if (d.pixel.col < 0 || d.pixel.col >= kTrackSize || d.pixel.row < 0 || d.pixel.row >= kTrackSize)
      throw Error(ErrorCode::invalid_argument, "detection pixel outside the 64x64 cell");

  // Detections by global pixel, each list sorted by date.
  std::unordered_map<GlobalPixel, std::vector<std::size_t>, PixelHash> by_pixel;
  std::vector<GlobalPixel> gp(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    gp[i] = global_pixel(dets[i]);
    by_pixel[gp[i]].push_back(i);
  }
  for (auto& [p, list] : by_pixel)
    std::sort(list.begin(), list.end(),
              [&](std::size_t a, std::size_t b) { return dets[a].date < dets[b].date; });

  DisjointSets sets(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        auto it = by_pixel.find({gp[i].x + dx, gp[i].y + dy});
        if (it == by_pixel.end()) continue;
        const auto& list = it->second;
        const Date lo = dets[i].date - params.max_gap_days;
        auto j = std::lower_bound(list.begin(), list.end(), lo,
                                  [&](std::size_t k, Date d) { return dets[k].date < d; });
        for (; j != list.end() && dets[*j].date <= dets[i].date + params.max_gap_days; ++j)
          sets.unite(i, *j);
      }

  std::map<std::size_t, FireEvent> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) groups[sets.find(i)].detections.push_back(dets[i]);

  struct Keyed {
    Date ignition;
    std::int64_t min_y, min_x;
    Detection first;
    FireEvent* event;
  };
  std::vector<Keyed> keyed;
  for (auto& [root, ev] : groups) {
    Keyed k{ev.detections.front().date, std::numeric_limits<std::int64_t>::max(),
            std::numeric_limits<std::int64_t>::max(), ev.detections.front(), &ev};
    for (const Detection& d : ev.detections) {
      const GlobalPixel g = global_pixel(d);
      k.ignition = std::min(k.ignition, d.date);
      k.min_y = std::min(k.min_y, g.y);
      k.min_x = std::min(k.min_x, g.x);
    }
    keyed.push_back(k);
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.ignition, a.min_y, a.min_x, a.first) <
           std::tie(b.ignition, b.min_y, b.min_x, b.first);
  });
  std::vector<FireEvent> out;
  for (const Keyed& k : keyed) {
    FireEvent ev = std::move(*k.event);
    ev.id = static_cast<int>(out.size());
    ev.ignition_date = k.ignition;
    out.push_back(std::move(ev));
  }
  return out;
}

Region bounding_region(std::span<const FireEvent> events) {
  Region r{std::numeric_limits<int>::max(), std::numeric_limits<int>::min(),
           std::numeric_limits<int>::max(), std::numeric_limits<int>::min()};
  bool any = false;
  for (const FireEvent& e : events)
    for (const Detection& d : e.detections) {
      any = true;
      r.x_min = std::min(r.x_min, d.cell.x);
      r.x_max = std::max(r.x_max, d.cell.x);
      r.y_min = std::min(r.y_min, d.cell.y);
      r.y_max = std::max(r.y_max, d.cell.y);
    }
  if (!any) throw Error(ErrorCode::empty_set, "no detections");
  return r;
}

FloatImage progression_raster(std::span<const FireEvent> events, const Region& region) {
  FloatImage out(1, region.height(), region.width(), std::numeric_limits<float>::quiet_NaN());
  for (const FireEvent& e : events)
    for (const Detection& d : e.detections) {
      if (!region.contains(d.cell)) continue;
      const int col = (d.cell.x - region.x_min) * kTrackSize + d.pixel.col;
      const int row = (region.y_max - d.cell.y) * kTrackSize + d.pixel.row;
      const auto days = static_cast<float>(d.date - e.ignition_date);
      float& v = out.at(row, col);
      if (std::isnan(v) || days < v) v = days;
    }
  return out;
}

std::map<CellId, FloatImage> cell_planes(const FloatImage& raster, const Region& region) {
  std::map<CellId, FloatImage> out;
  for (int y = region.y_min; y <= region.y_max; ++y)
    for (int x = region.x_min; x <= region.x_max; ++x) {
      FloatImage p(1, kTrackSize, kTrackSize);
      const int r0 = (region.y_max - y) * kTrackSize;
      const int c0 = (x - region.x_min) * kTrackSize;
      for (int r = 0; r < kTrackSize; ++r)
        for (int c = 0; c < kTrackSize; ++c) p.at(r, c) = raster.at(r0 + r, c0 + c);
      out.emplace(CellId{x, y}, std::move(p));
    }
  return out;
}

namespace {

std::set<std::pair<CellId, Date>> product_days(const PatchStore& store, const std::string& product,
                                               DateRange range) {
  std::set<std::pair<CellId, Date>> days;
  for (const PatchKey& k : store.keys())
    if (k.product == product && range.contains(k.date)) days.insert({k.cell, k.date});
  return days;
}

}  // namespace

std::vector<Detection> detections_from_store(const PatchStore& store, const std::string& product,
                                             DateRange range) {
  std::vector<Detection> out;
  for (const auto& [cell, date] : product_days(store, product, range)) {
    const Mask m = reduce_max(*daily_fire_mask(store, product, cell, date), kTrackSize);
    for (int r = 0; r < kTrackSize; ++r)
      for (int c = 0; c < kTrackSize; ++c)
        if (m.at(r, c)) out.push_back({cell, {c, r}, date});
  }
  return out;
}

Scores persistence_stats(const PatchStore& store, const std::string& product, DateRange range) {
  const auto days = product_days(store, product, range);
  std::set<Date> dates;
  for (const auto& d : days) dates.insert(d.second);
  if (dates.size() < 2)
    throw Error(ErrorCode::insufficient_dates,
                "persistence needs at least two dates of " + product + " in range");
  ConfusionCounts counts;
  bool any = false;
  for (const auto& [cell, date] : days) {
    if (!days.count({cell, date + 1})) continue;
    const Mask today = reduce_max(*daily_fire_mask(store, product, cell, date));
    if (std::none_of(today.data().begin(), today.data().end(), [](std::uint8_t v) { return v; }))
      continue;
    const Mask tomorrow = reduce_max(*daily_fire_mask(store, product, cell, date + 1));
    counts = accumulate(counts, today, tomorrow);
    any = true;
  }
  if (!any) throw Error(ErrorCode::empty_set, "no fire-selected consecutive days of " + product);
  return score(counts);
}

}  // namespace firecast
