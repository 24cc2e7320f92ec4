#include "firecast/pipeline.hpp"

#include <set>
#include <tuple>

#include "firecast/error.hpp"
#include "firecast/hash.hpp"

namespace firecast {

std::size_t resample_into(std::span<const Swath> swaths, std::span<const GeodeticRaster> rasters,
                          const GeoGrid& grid, const ResampleParams& params, PatchStore& store) {
  using GroupKey = std::tuple<std::string, DayNight, Date>;
  std::map<GroupKey, std::vector<Swath>> groups;
  for (const Swath& s : swaths) {
    if (s.n_pixels == 0) continue;
    double lon = 0;
    for (double v : s.lon) lon += v;
    lon /= static_cast<double>(s.n_pixels);
    groups[{s.sensor, s.daynight, local_date(s.acquired_at, lon)}].push_back(s);
  }
  std::size_t written = 0;
  for (const auto& [key, parts] : groups) {
    const Swath merged = parts.size() == 1 ? parts.front() : merge_swaths(parts);
    for (const PatchRaster& p : resample_swath(merged, grid, params)) {
      store.write(p);
      ++written;
    }
  }

  std::map<PatchKey, PatchRaster> stacked;
  for (const GeodeticRaster& r : rasters) {
    for (PatchRaster& p : patchify_geodetic(r, grid, product_for("", r.band))) {
      auto it = stacked.find(p.key());
      if (it == stacked.end()) {
        stacked.emplace(p.key(), std::move(p));
        continue;
      }
      PatchRaster& dst = it->second;
      if (dst.channel_index(p.channels.front().name) >= 0)
        throw Error(ErrorCode::validation, "duplicate geodetic band " + p.channels.front().name);
      dst.channels.insert(dst.channels.end(), p.channels.begin(), p.channels.end());
      dst.data.insert(dst.data.end(), p.data.begin(), p.data.end());
    }
  }
  for (const auto& [key, p] : stacked) {
    store.write(p);
    ++written;
  }
  return written;
}

std::vector<Combo> all_combos(const FireProducts& products) {
  std::vector<Combo> out;
  for (const char* sensor : {"MODIS", "VIIRS"})
    for (const std::string& tr : {products.modis, products.viirs})
      for (const std::string& ev : {products.modis, products.viirs}) out.push_back({sensor, tr, ev});
  return out;
}

std::vector<Combo> native_combos(const FireProducts& products) {
  return {{"MODIS", products.modis, products.modis}, {"VIIRS", products.viirs, products.viirs}};
}

void campaign_ranges(const CampaignConfig& c, int test_days, DateRange& trainval, DateRange& test) {
  const int n_test = test_days > 0 ? test_days : c.n_days / 3;
  if (n_test < 2 || c.n_days - n_test < 2)
    throw Error(ErrorCode::insufficient_dates, "campaign too short to hold train/val and test dates");
  const Date last = c.start + (c.n_days - 1);
  test = {last - (n_test - 1), last};
  trainval = {c.start, test.first - 1};
}

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedResult res;
  res.seed = seed;
  CampaignConfig cc = cfg.campaign;
  cc.seed = seed;
  const Campaign campaign = generate_campaign(cc, cfg.grid);
  MemoryStore store;
  resample_into(campaign.swaths, campaign.geodetic, cfg.grid, cfg.resample, store);

  DatasetConfig dc;
  dc.products = cfg.products;
  dc.split_seed = seed;
  dc.val_fraction = cfg.val_fraction;
  campaign_ranges(cc, cfg.test_days, dc.trainval, dc.test);

  std::set<std::string> sensors;
  for (const Combo& c : cfg.combos) sensors.insert(c.input_sensor);
  std::map<std::string, Dataset> datasets;
  for (const std::string& sensor : sensors) {
    dc.input_sensor = sensor;
    dc.manifest = cfg.synthetic_manifest ? synthetic_manifest(sensor) : default_manifest(sensor);
    datasets.emplace(sensor, build_dataset(store, dc));
  }
  if (datasets.empty()) return res;
  const Dataset& any = datasets.begin()->second;
  res.n_train = any.train.size();
  res.n_val = any.val.size();
  res.n_test = any.test.size();
  for (const std::string& prod : {cfg.products.modis, cfg.products.viirs})
    res.persistence[prod] = evaluate(persistence_predictor(prod), any.test, prod).scores;

  TrainConfig tc = cfg.train;
  for (const std::string& sensor : sensors) {
    const Dataset& ds = datasets.at(sensor);
    std::set<std::string> targets;
    for (const Combo& c : cfg.combos)
      if (c.input_sensor == sensor) targets.insert(c.train_target);
    SegNetArch arch = cfg.arch;
    arch.in_channels = static_cast<int>(ds.config.manifest.size());
    for (const std::string& target : targets) {
      tc.seed = hash_mix({seed, sensor == kModis ? 1u : 2u, target == cfg.products.modis ? 1u : 2u});
      const TrainResult tr = train(ds, target, arch, tc, cfg.loss);
      SegNet<float> net = load_network(tr.best);
      for (const Combo& c : cfg.combos) {
        if (c.input_sensor != sensor || c.train_target != target) continue;
        res.model[c] = evaluate(model_predictor(net), ds.test, c.eval_target).scores;
        res.best_epoch[c] = tr.best.epoch;
      }
    }
  }
  return res;
}

std::vector<ReportRow> summarize(std::span<const SeedResult> results, std::span<const Combo> combos) {
  std::vector<ReportRow> rows;
  if (results.empty()) return rows;
  for (const auto& [prod, s] : results.front().persistence) {
    std::vector<Scores> runs;
    for (const SeedResult& r : results) runs.push_back(r.persistence.at(prod));
    rows.push_back({"persistence", "-", prod, aggregate_runs(runs)});
  }
  for (const Combo& c : combos) {
    std::vector<Scores> runs;
    for (const SeedResult& r : results) runs.push_back(r.model.at(c));
    rows.push_back({c.input_sensor, c.train_target, c.eval_target, aggregate_runs(runs)});
  }
  return rows;
}

}  // namespace firecast
