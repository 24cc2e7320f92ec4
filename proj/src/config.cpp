#include "firecast/config.hpp"

#include <fstream>

#include "firecast/binio.hpp"
#include "firecast/error.hpp"
#include "firecast/json_io.hpp"
#include "firecast/pipeline.hpp"

namespace firecast {

using nlohmann::json;

namespace {

json sensor_json(const SensorModel& m) {
  return {{"sensor", m.sensor},
          {"mode", m.mode == ObservationMode::COHERENT ? "coherent" : "stochastic"},
          {"detect_prob", m.detect_prob},
          {"false_alarm_prob", m.false_alarm_prob},
          {"resolution", to_string(m.resolution)},
          {"jitter_px", m.jitter_px},
          {"noise_std", m.noise_std}};
}

ResolutionClass resolution_named(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(ResolutionClass::RC_GEODETIC); ++i)
    if (s == to_string(static_cast<ResolutionClass>(i))) return static_cast<ResolutionClass>(i);
  throw Error(ErrorCode::invalid_argument, "unknown resolution class '" + s + "'");
}

template <typename T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void sensor_from(const json& j, SensorModel& m) {
  get(j, "sensor", m.sensor);
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "coherent" && mode != "stochastic")
      throw Error(ErrorCode::invalid_argument, "unknown observation mode '" + mode + "'");
    m.mode = mode == "coherent" ? ObservationMode::COHERENT : ObservationMode::STOCHASTIC;
  }
  get(j, "detect_prob", m.detect_prob);
  get(j, "false_alarm_prob", m.false_alarm_prob);
  if (j.contains("resolution")) m.resolution = resolution_named(j.at("resolution").get<std::string>());
  get(j, "jitter_px", m.jitter_px);
  get(j, "noise_std", m.noise_std);
}

}  // namespace

void PipelineConfig::resolve_ranges(DateRange& tv, DateRange& te) const {
  if (trainval && test) {
    tv = *trainval;
    te = *test;
    return;
  }
  campaign_ranges(campaign, 0, tv, te);
  if (trainval) tv = *trainval;
  if (test) te = *test;
}

json to_json(const PipelineConfig& c) {
  const CampaignConfig& cc = c.campaign;
  json j = {
      {"grid", c.grid},
      {"resample", {{"k_neighbors", c.resample.k_neighbors},
                    {"power", c.resample.power},
                    {"radius_px", c.resample.radius_px},
                    {"nn_radius_px", c.resample.nn_radius_px}}},
      {"campaign", {{"start", cc.start},
                    {"n_days", cc.n_days},
                    {"n_cells", cc.n_cells},
                    {"origin", cc.origin},
                    {"grid_px", cc.grid_px},
                    {"ignitions_per_cell", cc.ignitions_per_cell},
                    {"ignition_window_days", cc.ignition_window_days},
                    {"p_spread", cc.p_spread},
                    {"wind_speed", cc.wind_speed},
                    {"burn_days", cc.burn_days == kBurnForever ? -1 : cc.burn_days},
                    {"viirs", sensor_json(cc.viirs)},
                    {"modis", sensor_json(cc.modis)},
                    {"weather", cc.weather}}},
      {"dataset", {{"input_sensor", c.input_sensor},
                   {"manifest", c.manifest},
                   {"products", {{"modis", c.products.modis}, {"viirs", c.products.viirs}}},
                   {"val_fraction", c.val_fraction}}},
      {"loss", {{"w", c.loss.w}, {"eps", c.loss.eps}}},
      {"arch", {{"levels", c.arch.levels}, {"width", c.arch.width}, {"out_pool", c.arch.out_pool}}},
      {"train", {{"learning_rate", c.train.learning_rate},
                 {"momentum", c.train.momentum},
                 {"batch_size", c.train.batch_size},
                 {"max_epochs", c.train.max_epochs},
                 {"threshold", c.train.threshold}}},
      {"tracker", {{"max_gap_days", c.tracker.max_gap_days}}},
      {"paths", {{"swaths", c.paths.swaths},
                 {"geodetic", c.paths.geodetic},
                 {"store", c.paths.store},
                 {"dataset", c.paths.dataset},
                 {"out", c.paths.out}}},
      {"seed", c.seed},
      {"jobs", c.jobs},
  };
  if (c.trainval) j["dataset"]["trainval"] = *c.trainval;
  if (c.test) j["dataset"]["test"] = *c.test;
  return j;
}

PipelineConfig config_from_json(const json& j, PipelineConfig c) {
  try {
    get(j, "grid", c.grid);
    if (j.contains("resample")) {
      const json& r = j.at("resample");
      get(r, "k_neighbors", c.resample.k_neighbors);
      get(r, "power", c.resample.power);
      get(r, "radius_px", c.resample.radius_px);
      get(r, "nn_radius_px", c.resample.nn_radius_px);
    }
    if (j.contains("campaign")) {
      const json& r = j.at("campaign");
      CampaignConfig& cc = c.campaign;
      get(r, "start", cc.start);
      get(r, "n_days", cc.n_days);
      get(r, "n_cells", cc.n_cells);
      get(r, "origin", cc.origin);
      get(r, "grid_px", cc.grid_px);
      get(r, "ignitions_per_cell", cc.ignitions_per_cell);
      get(r, "ignition_window_days", cc.ignition_window_days);
      get(r, "p_spread", cc.p_spread);
      get(r, "wind_speed", cc.wind_speed);
      if (r.contains("burn_days")) {
        const int b = r.at("burn_days").get<int>();
        cc.burn_days = b < 0 ? kBurnForever : b;
      }
      if (r.contains("viirs")) sensor_from(r.at("viirs"), cc.viirs);
      if (r.contains("modis")) sensor_from(r.at("modis"), cc.modis);
      get(r, "weather", cc.weather);
    }
    if (j.contains("dataset")) {
      const json& r = j.at("dataset");
      get(r, "input_sensor", c.input_sensor);
      get(r, "manifest", c.manifest);
      if (r.contains("products")) {
        get(r.at("products"), "modis", c.products.modis);
        get(r.at("products"), "viirs", c.products.viirs);
      }
      get(r, "val_fraction", c.val_fraction);
      if (r.contains("trainval")) c.trainval = r.at("trainval").get<DateRange>();
      if (r.contains("test")) c.test = r.at("test").get<DateRange>();
    }
    if (j.contains("loss")) {
      get(j.at("loss"), "w", c.loss.w);
      get(j.at("loss"), "eps", c.loss.eps);
    }
    if (j.contains("arch")) {
      get(j.at("arch"), "levels", c.arch.levels);
      get(j.at("arch"), "width", c.arch.width);
      get(j.at("arch"), "out_pool", c.arch.out_pool);
    }
    if (j.contains("train")) {
      const json& r = j.at("train");
      get(r, "learning_rate", c.train.learning_rate);
      get(r, "momentum", c.train.momentum);
      get(r, "batch_size", c.train.batch_size);
      get(r, "max_epochs", c.train.max_epochs);
      get(r, "threshold", c.train.threshold);
    }
    if (j.contains("tracker")) get(j.at("tracker"), "max_gap_days", c.tracker.max_gap_days);
    if (j.contains("paths")) {
      const json& r = j.at("paths");
      get(r, "swaths", c.paths.swaths);
      get(r, "geodetic", c.paths.geodetic);
      get(r, "store", c.paths.store);
      get(r, "dataset", c.paths.dataset);
      get(r, "out", c.paths.out);
    }
    get(j, "seed", c.seed);
    get(j, "jobs", c.jobs);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::not_found, "cannot open config " + path.string());
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_argument, path.string() + ": " + e.what());
  }
}

void save_config(const std::filesystem::path& dir, const PipelineConfig& cfg) {
  std::filesystem::create_directories(dir);
  const std::string text = to_json(cfg).dump(2) + "\n";
  binio::write_file_atomic(dir / "config.json", std::vector<std::uint8_t>(text.begin(), text.end()));
}

}  // namespace firecast
