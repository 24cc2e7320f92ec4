#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "firecast/dataset.hpp"
#include "firecast/eval.hpp"
#include "firecast/geodetic.hpp"
#include "firecast/loss.hpp"
#include "firecast/patch_store.hpp"
#include "firecast/resample.hpp"
#include "firecast/segnet.hpp"
#include "firecast/swath.hpp"
#include "firecast/synthgen.hpp"
#include "firecast/train.hpp"

namespace firecast {

/// Groups swaths by (sensor, overpass, local date), merges each group,
/// resamples it and writes the patches. Geodetic rasters of one product and
/// date are stacked into one multi-channel patch per cell.
/// Returns the number of patches written.
std::size_t resample_into(std::span<const Swath> swaths, std::span<const GeodeticRaster> rasters,
                          const GeoGrid& grid, const ResampleParams& params, PatchStore& store);

/// One (input, training target, evaluation target) combination.
struct Combo {
  std::string input_sensor;  // MODIS / VIIRS
  std::string train_target;  // fire product
  std::string eval_target;   // fire product

  auto operator<=>(const Combo&) const = default;
};

/// All eight combinations over two sensors and their two fire products.
std::vector<Combo> all_combos(const FireProducts& products = {});
/// Each sensor trained and evaluated on its own fire product.
std::vector<Combo> native_combos(const FireProducts& products = {});

struct ExperimentConfig {
  GeoGrid grid;
  CampaignConfig campaign;
  ResampleParams resample;
  bool synthetic_manifest = true;
  FireProducts products;
  int test_days = 0;  // 0: last third of the campaign
  double val_fraction = 0.25;
  SegNetArch arch;
  TrainConfig train;
  LossSpec loss;
  std::vector<Combo> combos = native_combos();
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::size_t n_train = 0, n_val = 0, n_test = 0;
  std::map<std::string, Scores> persistence;  // per fire product, on the test set
  std::map<Combo, Scores> model;
  std::map<Combo, int> best_epoch;
};

/// Train/val and test date ranges for a campaign.
void campaign_ranges(const CampaignConfig& c, int test_days, DateRange& trainval, DateRange& test);

/// Full synthetic run for one seed: campaign, store, datasets, training and
/// test-set evaluation of every configured combination.
SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Report rows: persistence per product, then every combination.
std::vector<ReportRow> summarize(std::span<const SeedResult> results, std::span<const Combo> combos);

}  // namespace firecast
