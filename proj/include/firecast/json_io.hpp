#pragma once

#include <json.hpp>

#include "firecast/bands.hpp"
#include "firecast/date.hpp"
#include "firecast/grid.hpp"

// nlohmann/json adapters for the shared value types.
namespace firecast {

inline void to_json(nlohmann::json& j, const CellId& c) { j = nlohmann::json{c.x, c.y}; }
inline void from_json(const nlohmann::json& j, CellId& c) {
  c.x = j.at(0).get<int>();
  c.y = j.at(1).get<int>();
}

inline void to_json(nlohmann::json& j, const Date& d) { j = d.iso(); }
inline void from_json(const nlohmann::json& j, Date& d) { d = Date::parse(j.get<std::string>()); }

inline void to_json(nlohmann::json& j, const DateRange& r) { j = {{"first", r.first}, {"last", r.last}}; }
inline void from_json(const nlohmann::json& j, DateRange& r) {
  r.first = j.at("first").get<Date>();
  r.last = j.at("last").get<Date>();
}

inline void to_json(nlohmann::json& j, const BandSpec& b) {
  j = {{"name", b.name},
       {"resolution", static_cast<int>(b.resolution)},
       {"kind", static_cast<int>(b.kind)}};
}
inline void from_json(const nlohmann::json& j, BandSpec& b) {
  b.name = j.at("name").get<std::string>();
  b.resolution = static_cast<ResolutionClass>(j.at("resolution").get<int>());
  b.kind = static_cast<BandKind>(j.at("kind").get<int>());
}

inline void to_json(nlohmann::json& j, const GeoGrid& g) {
  j = {{"lon_min", g.lon_min}, {"lat_min", g.lat_min}, {"cell_deg", g.cell_deg},
       {"n_cols", g.n_cols},   {"n_rows", g.n_rows}};
}
inline void from_json(const nlohmann::json& j, GeoGrid& g) {
  g.lon_min = j.at("lon_min").get<double>();
  g.lat_min = j.at("lat_min").get<double>();
  g.cell_deg = j.at("cell_deg").get<double>();
  g.n_cols = j.at("n_cols").get<int>();
  g.n_rows = j.at("n_rows").get<int>();
}

}  // namespace firecast
