#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "firecast/date.hpp"
#include "firecast/geodetic.hpp"
#include "firecast/grid.hpp"
#include "firecast/image.hpp"
#include "firecast/swath.hpp"

namespace firecast {

inline constexpr int kBurnForever = std::numeric_limits<int>::max();

struct Ignition {
  int col = 0;  // raster pixel, row 0 at the north edge
  int row = 0;
  int day = 0;
};

/// Cellular-automaton fire over a block of grid cells. The raster covers
/// cells [origin.x, origin.x + cells_x) x [origin.y, origin.y + cells_y) at
/// grid_px true-state pixels per cell edge, north-up.
struct FireSimParams {
  int grid_px = 192;
  CellId origin;
  int cells_x = 1;
  int cells_y = 1;
  std::vector<Ignition> ignitions;
  double p_spread = 0.2;
  double wind_east = 0.0;   // added to the per-neighbour spread probability
  double wind_north = 0.0;  // along the unit source-to-target direction
  int burn_days = 3;        // kBurnForever: pixels never extinguish
  std::uint64_t seed = 0;

  int width() const { return grid_px * cells_x; }
  int height() const { return grid_px * cells_y; }
};

/// Daily binary burning state; days[d] is the raster on simulation day d.
struct FireHistory {
  FireSimParams params;
  std::vector<Mask> days;

  /// Consecutive days pixel (r, c) has been burning as of `day` (0 = ignited
  /// that day); -1 when not burning.
  int age(int day, int row, int col) const;
  /// Burning intensity in (0, 1], decaying with age; 0 when not burning.
  double intensity(int day, int row, int col) const;
};

/// Throws Error(invalid_ignition) for ignitions outside the raster or on a
/// negative day, Error(invalid_argument) for bad parameters.
FireHistory simulate_fire(const FireSimParams& params, int n_days);

enum class ObservationMode : std::uint8_t { COHERENT, STOCHASTIC };

struct SensorModel {
  std::string sensor{"VIIRS"};
  ObservationMode mode = ObservationMode::COHERENT;
  double detect_prob = 1.0;  // ignored (1.0) in COHERENT mode
  double false_alarm_prob = 0.0;
  ResolutionClass resolution = ResolutionClass::RC_375M;
  double jitter_px = 0.0;
  double noise_std = 0.05;  // proxy emissive band noise

  double effective_detect_prob() const {
    return mode == ObservationMode::COHERENT ? 1.0 : detect_prob;
  }
  void validate() const;
};

/// Default VNP14-like and MOD14-like observation models.
SensorModel coherent_viirs();
SensorModel stochastic_modis(double detect_prob = 0.5);

/// Name of the emissive proxy band written by observe() for a sensor model.
BandSpec proxy_band(const SensorModel& model);

/// Synthetic overpass of one cell on simulation day `day` (calendar date
/// start + day): a FIREMASK band and an EMISSIVE proxy (intensity + noise),
/// one source pixel per sensor pixel centre. Deterministic in `seed`.
Swath observe(const FireHistory& truth, const SensorModel& model, const GeoGrid& grid,
              CellId cell, int day, DayNight dn, Date start, std::uint64_t seed);

/// Per-(cell, day, overpass) seed derived from a master seed.
std::uint64_t observation_seed(std::uint64_t master, CellId cell, int day, DayNight dn,
                               std::uint64_t stream);

struct CampaignConfig {
  Date start = Date::from_ymd(2019, 10, 1);
  int n_days = 30;
  int n_cells = 8;
  CellId origin{47, 8};  // south-east Australia on the default grid
  int grid_px = 192;
  int ignitions_per_cell = 3;
  int ignition_window_days = 0;  // 0: spread ignitions over n_days - 2
  double p_spread = 0.2;
  double wind_speed = 0.15;
  int burn_days = 3;
  SensorModel viirs = coherent_viirs();
  SensorModel modis = stochastic_modis();
  bool weather = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Campaign {
  FireHistory truth;
  std::vector<CellId> cells;  // observed cells
  std::vector<Swath> swaths;  // both sensors, every cell, day and overpass
  std::vector<GeodeticRaster> geodetic;
};

/// Lays out `n_cells` cells as a block starting at `origin`, simulates one
/// fire campaign over it and observes it with both sensor models.
Campaign generate_campaign(const CampaignConfig& cfg, const GeoGrid& grid);

/// Cells of the campaign block in row-major order (first n_cells).
std::vector<CellId> campaign_cells(const CampaignConfig& cfg, int& cells_x, int& cells_y);

}  // namespace firecast
