#include "firecast/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "firecast/error.hpp"
#include "firecast/hash.hpp"

namespace firecast {
namespace {

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

enum : std::uint64_t { kStreamSpread = 1, kStreamDetect = 2, kStreamFalse = 3, kStreamNoise = 4,
                       kStreamJitter = 5 };

std::string proxy_name(const SensorModel& m) {
  if (m.sensor == kModis) return "B21";
  if (m.sensor == kViirs)
    return m.resolution == ResolutionClass::RC_750M ? "M13" : "I4";
  return "TIR";
}

}  // namespace

int FireHistory::age(int day, int row, int col) const {
  if (day < 0 || day >= static_cast<int>(days.size()) || !days[day].at(row, col)) return -1;
  int a = 0;
  while (day - a - 1 >= 0 && days[day - a - 1].at(row, col)) ++a;
  return a;
}

double FireHistory::intensity(int day, int row, int col) const {
  if (day < 0 || day >= static_cast<int>(days.size()) || !days[day].at(row, col)) return 0.0;
  if (params.burn_days == kBurnForever) return 1.0;
  const int a = age(day, row, col);
  return 1.0 - static_cast<double>(a) / params.burn_days;
}

FireHistory simulate_fire(const FireSimParams& p, int n_days) {
  if (n_days < 1 || p.grid_px < 1 || p.cells_x < 1 || p.cells_y < 1)
    throw Error(ErrorCode::invalid_argument, "simulation needs n_days >= 1 and a non-empty raster");
  if (!(p.p_spread >= 0 && p.p_spread <= 1) || p.burn_days < 1)
    throw Error(ErrorCode::invalid_argument, "p_spread must lie in [0,1] and burn_days >= 1");
  const int w = p.width();
  const int h = p.height();
  for (const auto& ig : p.ignitions)
    if (ig.col < 0 || ig.row < 0 || ig.col >= w || ig.row >= h || ig.day < 0)
      throw Error(ErrorCode::invalid_ignition, "ignition outside the raster or before day 0");

  // Spread probability from a burning neighbour at offset k toward the pixel.
  double q[8];
  for (int k = 0; k < 8; ++k) {
    // Direction of travel from the neighbour to the pixel: (-dc east, +dr north).
    const double east = -kDc[k];
    const double north = kDr[k];
    const double norm = std::hypot(east, north);
    const double bias = (p.wind_east * east + p.wind_north * north) / norm;
    q[k] = std::clamp(p.p_spread + bias, 0.0, 1.0);
  }

  FireHistory out;
  out.params = p;
  std::vector<int> start(static_cast<std::size_t>(w) * h, -1);
  Mask burning(1, h, w, 0);
  for (int day = 0; day < n_days; ++day) {
    Mask next(1, h, w, 0);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        if (start[i] >= 0) {
          if (day > 0 && burning.at(r, c) &&
              (p.burn_days == kBurnForever || day - start[i] < p.burn_days))
            next.at(r, c) = 1;
          continue;
        }
        if (day == 0) continue;
        double keep = 1.0;
        for (int k = 0; k < 8; ++k) {
          const int rr = r + kDr[k];
          const int cc = c + kDc[k];
          if (rr < 0 || cc < 0 || rr >= h || cc >= w || !burning.at(rr, cc)) continue;
          keep *= 1.0 - q[k];
        }
        if (keep < 1.0 &&
            hash_uniform({p.seed, kStreamSpread, static_cast<std::uint64_t>(day), i}) < 1.0 - keep) {
          next.at(r, c) = 1;
          start[i] = day;
        }
      }
    for (const auto& ig : p.ignitions) {
      if (ig.day != day) continue;
      const std::size_t i = static_cast<std::size_t>(ig.row) * w + ig.col;
      if (start[i] >= 0) continue;
      start[i] = day;
      next.at(ig.row, ig.col) = 1;
    }
    out.days.push_back(next);
    burning = std::move(next);
  }
  return out;
}

void SensorModel::validate() const {
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!prob(detect_prob) || !prob(false_alarm_prob))
    throw Error(ErrorCode::invalid_argument, "sensor probabilities must lie in [0,1]");
  if (!(jitter_px >= 0) || !(noise_std >= 0))
    throw Error(ErrorCode::invalid_argument, "jitter and noise must be non-negative");
}

SensorModel coherent_viirs() {
  SensorModel m;
  m.sensor = std::string(kViirs);
  m.mode = ObservationMode::COHERENT;
  m.resolution = ResolutionClass::RC_375M;
  return m;
}

SensorModel stochastic_modis(double detect_prob) {
  SensorModel m;
  m.sensor = std::string(kModis);
  m.mode = ObservationMode::STOCHASTIC;
  m.detect_prob = detect_prob;
  m.resolution = ResolutionClass::RC_1KM;
  return m;
}

BandSpec proxy_band(const SensorModel& model) {
  return {proxy_name(model), model.resolution, BandKind::EMISSIVE};
}

std::uint64_t observation_seed(std::uint64_t master, CellId cell, int day, DayNight dn,
                               std::uint64_t stream) {
  return hash_mix({master, static_cast<std::uint64_t>(cell.x), static_cast<std::uint64_t>(cell.y),
                   static_cast<std::uint64_t>(day), static_cast<std::uint64_t>(dn), stream});
}

Swath observe(const FireHistory& truth, const SensorModel& model, const GeoGrid& grid,
              CellId cell, int day, DayNight dn, Date start, std::uint64_t seed) {
  model.validate();
  const FireSimParams& sp = truth.params;
  if (day < 0 || day >= static_cast<int>(truth.days.size()))
    throw Error(ErrorCode::invalid_argument, "observation day outside the simulation");
  if (cell.x < sp.origin.x || cell.x >= sp.origin.x + sp.cells_x || cell.y < sp.origin.y ||
      cell.y >= sp.origin.y + sp.cells_y)
    throw Error(ErrorCode::invalid_argument, "cell " + cell_name(cell) + " outside the simulation");
  const int px = patch_size_for(model.resolution);
  const int g = sp.grid_px;
  if (g % px != 0 && px % g != 0)
    throw Error(ErrorCode::invalid_argument, "sensor and true-state resolutions must nest");
  const int col0 = (cell.x - sp.origin.x) * g;
  const int row0 = (sp.origin.y + sp.cells_y - 1 - cell.y) * g;

  Swath s;
  s.sensor = model.sensor;
  s.daynight = dn;
  s.acquired_at = utc_seconds_at_local(start + day, overpass_local_hour(model.sensor, dn),
                                       grid.cell_center(cell).first);
  s.n_pixels = static_cast<std::uint32_t>(px * px);
  s.lon.resize(s.n_pixels);
  s.lat.resize(s.n_pixels);
  SwathBand mask{fire_mask_band(model.sensor), {}, std::vector<std::uint8_t>(s.n_pixels)};
  mask.spec.resolution = model.resolution;
  SwathBand proxy{proxy_band(model), std::vector<float>(s.n_pixels), {}};

  const LonLatBox b = grid.cell_bounds(cell);
  const double pdet = model.effective_detect_prob();
  for (int r = 0; r < px; ++r)
    for (int c = 0; c < px; ++c) {
      const std::uint64_t i = static_cast<std::uint64_t>(r) * px + c;
      bool burning = false;
      double intensity = 0.0;
      if (g >= px) {
        const int k = g / px;
        for (int dr = 0; dr < k; ++dr)
          for (int dc = 0; dc < k; ++dc) {
            const int tr = row0 + r * k + dr;
            const int tc = col0 + c * k + dc;
            burning = burning || truth.days[day].at(tr, tc);
            intensity += truth.intensity(day, tr, tc);
          }
        intensity /= k * k;
      } else {
        const int k = px / g;
        const int tr = row0 + r / k;
        const int tc = col0 + c / k;
        burning = truth.days[day].at(tr, tc);
        intensity = truth.intensity(day, tr, tc);
      }
      // Shared uniforms make lower detect_prob a pixel-wise thinning.
      const bool flagged = burning ? hash_uniform({seed, kStreamDetect, i}) < pdet
                                   : hash_uniform({seed, kStreamFalse, i}) < model.false_alarm_prob;
      std::uint8_t cls = kClassNonFireLand;
      if (flagged)
        cls = intensity > 2.0 / 3.0 ? kClassFireHigh
              : intensity > 1.0 / 3.0 ? kClassFireNominal : kClassFireLow;
      mask.classes[i] = cls;
      proxy.values[i] = static_cast<float>(
          intensity + model.noise_std * hash_normal(hash_mix({seed, kStreamNoise, i})));
      double jc = 0.0, jr = 0.0;
      if (model.jitter_px > 0) {
        jc = model.jitter_px * hash_normal(hash_mix({seed, kStreamJitter, 2 * i}));
        jr = model.jitter_px * hash_normal(hash_mix({seed, kStreamJitter, 2 * i + 1}));
      }
      s.lon[i] = static_cast<float>(b.lon_min + (c + 0.5 + jc) / px * grid.cell_deg);
      s.lat[i] = static_cast<float>(b.lat_max - (r + 0.5 + jr) / px * grid.cell_deg);
    }
  s.bands.push_back(std::move(mask));
  s.bands.push_back(std::move(proxy));
  return s;
}

void CampaignConfig::validate() const {
  if (n_days < 2 || n_cells < 1 || grid_px < 1 || ignitions_per_cell < 0 || burn_days < 1)
    throw Error(ErrorCode::invalid_argument, "campaign needs >= 2 days and >= 1 cell");
  viirs.validate();
  modis.validate();
}

std::vector<CellId> campaign_cells(const CampaignConfig& cfg, int& cells_x, int& cells_y) {
  cells_y = cfg.n_cells >= 4 ? 2 : 1;
  cells_x = (cfg.n_cells + cells_y - 1) / cells_y;
  std::vector<CellId> out;
  for (int j = 0; j < cells_y; ++j)
    for (int i = 0; i < cells_x; ++i)
      if (static_cast<int>(out.size()) < cfg.n_cells)
        out.push_back({cfg.origin.x + i, cfg.origin.y + cells_y - 1 - j});
  return out;
}

Campaign generate_campaign(const CampaignConfig& cfg, const GeoGrid& grid) {
  cfg.validate();
  Campaign out;
  int cx = 0, cy = 0;
  out.cells = campaign_cells(cfg, cx, cy);
  for (CellId c : out.cells)
    if (!grid.contains(c))
      throw Error(ErrorCode::invalid_argument, "campaign cell " + cell_name(c) + " outside grid");

  FireSimParams sp;
  sp.grid_px = cfg.grid_px;
  sp.origin = {cfg.origin.x, cfg.origin.y};
  sp.cells_x = cx;
  sp.cells_y = cy;
  sp.p_spread = cfg.p_spread;
  sp.burn_days = cfg.burn_days;
  sp.seed = hash_mix({cfg.seed, 0xF17Eull});
  SplitMixStream rng(hash_mix({cfg.seed, 0x16417ull}));
  const double angle = 2.0 * 3.14159265358979323846 * rng.uniform();
  sp.wind_east = cfg.wind_speed * std::cos(angle);
  sp.wind_north = cfg.wind_speed * std::sin(angle);
  const int window = cfg.ignition_window_days > 0 ? cfg.ignition_window_days
                                                  : std::max(1, cfg.n_days - 2);
  const int margin = cfg.grid_px / 8;
  for (CellId c : out.cells) {
    const int col0 = (c.x - sp.origin.x) * cfg.grid_px;
    const int row0 = (sp.origin.y + cy - 1 - c.y) * cfg.grid_px;
    for (int k = 0; k < cfg.ignitions_per_cell; ++k) {
      Ignition ig;
      const auto span = static_cast<std::uint64_t>(std::max(1, cfg.grid_px - 2 * margin));
      ig.col = col0 + margin + static_cast<int>(rng.below(span));
      ig.row = row0 + margin + static_cast<int>(rng.below(span));
      ig.day = static_cast<int>(rng.below(static_cast<std::uint64_t>(window)));
      sp.ignitions.push_back(ig);
    }
  }
  std::sort(sp.ignitions.begin(), sp.ignitions.end(), [](const Ignition& a, const Ignition& b) {
    return std::tie(a.day, a.row, a.col) < std::tie(b.day, b.row, b.col);
  });
  out.truth = simulate_fire(sp, cfg.n_days);

  for (int day = 0; day < cfg.n_days; ++day)
    for (CellId c : out.cells)
      for (DayNight dn : {DayNight::DAY, DayNight::NIGHT}) {
        out.swaths.push_back(observe(out.truth, cfg.modis, grid, c, day, dn, cfg.start,
                                     observation_seed(cfg.seed, c, day, dn, 1)));
        out.swaths.push_back(observe(out.truth, cfg.viirs, grid, c, day, dn, cfg.start,
                                     observation_seed(cfg.seed, c, day, dn, 2)));
      }

  if (cfg.weather) {
    // Coarse daily fields over the campaign block: wind matches the CA bias.
    const int per_cell = 16;
    const LonLatBox nw = grid.cell_bounds({sp.origin.x, sp.origin.y + cy - 1});
    for (int day = 0; day < cfg.n_days; ++day) {
      auto field = [&](BandSpec band, auto value) {
        GeodeticRaster r;
        r.band = std::move(band);
        r.date = cfg.start + day;
        r.lon_west = nw.lon_min;
        r.lat_north = nw.lat_max;
        r.dlon = r.dlat = grid.cell_deg / per_cell;
        r.width = cx * per_cell;
        r.height = cy * per_cell;
        r.values.resize(static_cast<std::size_t>(r.width) * r.height);
        for (int row = 0; row < r.height; ++row)
          for (int col = 0; col < r.width; ++col)
            r.values[static_cast<std::size_t>(row) * r.width + col] =
                static_cast<float>(value(row, col));
        out.geodetic.push_back(std::move(r));
      };
      const auto wb = weather_bands();
      field(wb[0], [&](int row, int) { return 295.0 + 4.0 * std::sin(0.3 * day) - 0.05 * row; });
      field(wb[2], [&](int, int) { return 40.0 * sp.wind_east; });
      field(wb[3], [&](int, int) { return 40.0 * sp.wind_north; });
      field(drought_band(), [&](int, int col) { return 60.0 + day + 0.1 * col; });
    }
  }
  return out;
}

}  // namespace firecast
