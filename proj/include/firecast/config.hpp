#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "firecast/dataset.hpp"
#include "firecast/grid.hpp"
#include "firecast/loss.hpp"
#include "firecast/progression.hpp"
#include "firecast/resample.hpp"
#include "firecast/segnet.hpp"
#include "firecast/synthgen.hpp"
#include "firecast/train.hpp"

namespace firecast {

struct PipelinePaths {
  std::string swaths;
  std::string geodetic;
  std::string store;
  std::string dataset;
  std::string out;
};

/// Every setting of a run; written as config.json next to each output.
struct PipelineConfig {
  GeoGrid grid;
  ResampleParams resample;
  CampaignConfig campaign;
  std::string input_sensor{"VIIRS"};
  std::string manifest{"syn-viirs"};
  FireProducts products;
  std::optional<DateRange> trainval;  // default: campaign dates minus the test span
  std::optional<DateRange> test;      // default: last third of the campaign
  double val_fraction = 0.25;
  LossSpec loss;
  SegNetArch arch{4, 3, 8, 3};
  TrainConfig train;
  TrackerParams tracker;
  PipelinePaths paths;
  std::uint64_t seed = 0;
  int jobs = 1;

  /// Campaign-derived date ranges when none are configured.
  void resolve_ranges(DateRange& tv, DateRange& te) const;
};

nlohmann::json to_json(const PipelineConfig& cfg);
/// Missing keys keep their defaults. Throws Error(invalid_argument).
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& dir, const PipelineConfig& cfg);

}  // namespace firecast
