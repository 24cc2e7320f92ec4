#include "firecast/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <thread>

#include "firecast/binio.hpp"
#include "firecast/config.hpp"
#include "firecast/error.hpp"
#include "firecast/eval.hpp"
#include "firecast/json_io.hpp"
#include "firecast/pipeline.hpp"
#include "firecast/progression.hpp"
#include "firecast/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace firecast {
namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string store;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "pipeline configuration (JSON)");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--jobs", c.jobs, "worker threads");
  app->add_option("--store", c.store, "patch store directory");
  app->add_option("--out", c.out, "output directory or file");
}

PipelineConfig resolve(const Common& c) {
  PipelineConfig cfg = c.config.empty() ? PipelineConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.jobs) cfg.jobs = std::max(1, *c.jobs);
  if (!c.store.empty()) cfg.paths.store = c.store;
  if (!c.out.empty()) cfg.paths.out = c.out;
  cfg.campaign.seed = cfg.seed;
  cfg.train.seed = cfg.seed;
  return cfg;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw CLI::ValidationError(std::string(flag) + " is required");
}

DateRange parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorCode::invalid_argument, "date range must be FIRST:LAST, got '" + s + "'");
  DateRange r{Date::parse(s.substr(0, colon)), Date::parse(s.substr(colon + 1))};
  if (r.last < r.first) throw Error(ErrorCode::invalid_argument, "date range '" + s + "' is reversed");
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  binio::write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::not_found, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt_entry, path.string() + ": " + e.what());
  }
}

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::not_found, "no directory " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string fire_product_for(const PipelineConfig& cfg, const std::string& sensor) {
  return sensor == kModis ? cfg.products.modis : cfg.products.viirs;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// --- subcommands -------------------------------------------------------------

struct SynthArgs {
  std::optional<int> days, cells;
  std::optional<double> p_spread;
  std::optional<int> burn_days;
  bool static_fire = false;
  bool no_swaths = false;
};

int cmd_synth(const Common& common, const SynthArgs& a, std::ostream& out) {
  PipelineConfig cfg = resolve(common);
  require(cfg.paths.out, "--out");
  CampaignConfig& cc = cfg.campaign;
  if (a.days) cc.n_days = *a.days;
  if (a.cells) cc.n_cells = *a.cells;
  if (a.static_fire) {
    cc.p_spread = 0;
    cc.wind_speed = 0;
    cc.burn_days = kBurnForever;
    cc.ignition_window_days = 1;
    cc.modis.mode = ObservationMode::COHERENT;
    cc.modis.detect_prob = 1.0;
  }
  if (a.p_spread) cc.p_spread = *a.p_spread;
  if (a.burn_days) cc.burn_days = *a.burn_days < 0 ? kBurnForever : *a.burn_days;
  const fs::path root = cfg.paths.out;
  if (cfg.paths.store.empty()) cfg.paths.store = (root / "store").string();
  if (!a.no_swaths) {
    cfg.paths.swaths = (root / "swaths").string();
    cfg.paths.geodetic = (root / "geodetic").string();
  }

  const Campaign campaign = generate_campaign(cc, cfg.grid);
  if (!a.no_swaths) {
    fs::create_directories(cfg.paths.swaths);
    fs::create_directories(cfg.paths.geodetic);
    for (const Swath& s : campaign.swaths) {
      double lon = 0, lat = 0;
      for (std::uint32_t i = 0; i < s.n_pixels; ++i) {
        lon += s.lon[i];
        lat += s.lat[i];
      }
      lon /= s.n_pixels;
      lat /= s.n_pixels;
      const auto cell = cell_of(cfg.grid, lon, lat);
      const std::string name = s.sensor + "_" + local_date(s.acquired_at, lon).compact() + "_" +
                               daynight_letter(s.daynight) + "_" +
                               (cell ? cell_name(*cell) : std::string("outside")) + ".swt";
      write_swath(fs::path(cfg.paths.swaths) / name, s);
    }
    for (const GeodeticRaster& r : campaign.geodetic)
      write_geodetic(fs::path(cfg.paths.geodetic) / (r.band.name + "_" + r.date.compact() + ".geo"), r);
  }
  DirectoryStore store(cfg.paths.store);
  const std::size_t n = resample_into(campaign.swaths, campaign.geodetic, cfg.grid, cfg.resample, store);
  save_config(root, cfg);
  out << "synth: " << campaign.cells.size() << " cells, " << cc.n_days << " days, "
      << campaign.swaths.size() << " swaths, " << n << " patches -> " << cfg.paths.store << "\n";
  return kExitOk;
}

int cmd_resample(const Common& common, const std::string& swaths, const std::string& geo,
                 std::ostream& out) {
  PipelineConfig cfg = resolve(common);
  if (!swaths.empty()) cfg.paths.swaths = swaths;
  if (!geo.empty()) cfg.paths.geodetic = geo;
  require(cfg.paths.store, "--store");
  if (cfg.paths.swaths.empty() && cfg.paths.geodetic.empty())
    throw CLI::ValidationError("--swaths or --geodetic is required");
  std::vector<Swath> sw;
  std::vector<GeodeticRaster> rasters;
  if (!cfg.paths.swaths.empty())
    for (const auto& p : files_with_extension(cfg.paths.swaths, ".swt")) sw.push_back(read_swath(p));
  if (!cfg.paths.geodetic.empty())
    for (const auto& p : files_with_extension(cfg.paths.geodetic, ".geo"))
      rasters.push_back(read_geodetic(p));
  DirectoryStore store(cfg.paths.store);
  const std::size_t n = resample_into(sw, rasters, cfg.grid, cfg.resample, store);
  save_config(cfg.paths.out.empty() ? fs::path(cfg.paths.store) : fs::path(cfg.paths.out), cfg);
  out << "resample: " << sw.size() << " swaths, " << rasters.size() << " geodetic rasters, " << n
      << " patches\n";
  return kExitOk;
}

struct DatasetArgs {
  std::string input_sensor, manifest, trainval, test;
  std::optional<double> val_fraction;
};

int cmd_make_dataset(const Common& common, const DatasetArgs& a, std::ostream& out) {
  PipelineConfig cfg = resolve(common);
  require(cfg.paths.store, "--store");
  require(cfg.paths.out, "--out");
  if (!a.input_sensor.empty()) {
    cfg.input_sensor = a.input_sensor;
    if (a.manifest.empty()) cfg.manifest = a.input_sensor == kModis ? "syn-modis" : "syn-viirs";
  }
  if (!a.manifest.empty()) cfg.manifest = a.manifest;
  if (!a.trainval.empty()) cfg.trainval = parse_range(a.trainval);
  if (!a.test.empty()) cfg.test = parse_range(a.test);
  if (a.val_fraction) cfg.val_fraction = *a.val_fraction;
  cfg.paths.dataset = cfg.paths.out;

  DatasetConfig dc;
  dc.input_sensor = cfg.input_sensor;
  dc.manifest = manifest_by_name(cfg.manifest);
  dc.products = cfg.products;
  const DirectoryStore store(cfg.paths.store);
  if (!cfg.trainval || !cfg.test) {
    // Default ranges follow the dates actually present in the store.
    const auto keys = store.keys();
    if (keys.empty()) throw Error(ErrorCode::empty_store, "store is empty");
    Date first = keys.front().date, last = first;
    for (const PatchKey& k : keys) {
      first = std::min(first, k.date);
      last = std::max(last, k.date);
    }
    cfg.campaign.start = first;
    cfg.campaign.n_days = last - first + 1;
  }
  cfg.resolve_ranges(dc.trainval, dc.test);
  dc.split_seed = cfg.seed;
  dc.val_fraction = cfg.val_fraction;
  const Dataset ds = build_dataset(store, dc);
  save_dataset(ds, cfg.paths.out);
  save_config(cfg.paths.out, cfg);
  out << "make-dataset: " << ds.train.size() << " train, " << ds.val.size() << " val, "
      << ds.test.size() << " test samples, " << dc.manifest.size() << " channels\n";
  return kExitOk;
}

struct TrainArgs {
  std::string dataset, target;
  std::optional<int> epochs, batch, levels, width;
  std::optional<double> lr;
};

int cmd_train(const Common& common, const TrainArgs& a, std::ostream& out) {
  PipelineConfig cfg = resolve(common);
  if (!a.dataset.empty()) cfg.paths.dataset = a.dataset;
  require(cfg.paths.dataset, "--dataset");
  require(cfg.paths.out, "--out");
  if (a.epochs) cfg.train.max_epochs = *a.epochs;
  if (a.batch) cfg.train.batch_size = *a.batch;
  if (a.lr) cfg.train.learning_rate = *a.lr;
  if (a.levels) cfg.arch.levels = *a.levels;
  if (a.width) cfg.arch.width = *a.width;
  const Dataset ds = load_dataset(cfg.paths.dataset);
  if (ds.train.empty() && ds.val.empty()) throw Error(ErrorCode::empty_split, "empty sample set");
  const std::string target = a.target.empty() ? fire_product_for(cfg, ds.config.input_sensor) : a.target;
  cfg.input_sensor = ds.config.input_sensor;
  cfg.manifest = ds.config.manifest.name;
  cfg.arch.in_channels = static_cast<int>(ds.config.manifest.size());

  const TrainResult r = train(ds, target, cfg.arch, cfg.train, cfg.loss);
  const fs::path dir = cfg.paths.out;
  fs::create_directories(dir);
  write_checkpoint(dir / "checkpoint.ckpt", r.best);
  write_train_log(dir / "train_log.jsonl", r.log);
  write_text(dir / "train.json", json{{"input_sensor", ds.config.input_sensor},
                                      {"train_target", target},
                                      {"best_epoch", r.best.epoch},
                                      {"val_iou", r.best.val_iou},
                                      {"n_params", r.best.params.size()}}
                                         .dump(2) +
                                     "\n");
  save_config(dir, cfg);
  out << "train: best epoch " << r.best.epoch << ", val IoU " << 100 * r.best.val_iou << "%\n";
  return kExitOk;
}

struct EvalArgs {
  std::string dataset, checkpoint, baseline, target, split{"test"};
  bool save_predictions = false;
};

int cmd_evaluate(const Common& common, const EvalArgs& a, std::ostream& out) {
  PipelineConfig cfg = resolve(common);
  if (!a.dataset.empty()) cfg.paths.dataset = a.dataset;
  require(cfg.paths.dataset, "--dataset");
  if (a.checkpoint.empty() == a.baseline.empty())
    throw CLI::ValidationError("exactly one of --checkpoint or --baseline is required");
  if (!a.baseline.empty() && a.baseline != "persistence")
    throw CLI::ValidationError("unknown baseline '" + a.baseline + "'");
  const Dataset ds = load_dataset(cfg.paths.dataset);
  const std::vector<Sample>* set = a.split == "test" ? &ds.test : a.split == "val" ? &ds.val
                                  : a.split == "train"                 ? &ds.train
                                                                       : nullptr;
  if (!set) throw CLI::ValidationError("--split must be train, val or test");
  const std::string target = a.target.empty() ? fire_product_for(cfg, ds.config.input_sensor) : a.target;

  ReportRow row{ds.config.input_sensor, "-", target, {}};
  Evaluation ev;
  std::optional<SegNet<float>> net;
  Predictor predictor;
  if (!a.baseline.empty()) {
    row.input = "persistence";
    predictor = persistence_predictor(target);
  } else {
    net.emplace(load_network(read_checkpoint(a.checkpoint)));
    const fs::path meta = fs::path(a.checkpoint).parent_path() / "train.json";
    if (fs::exists(meta)) row.train_target = read_json(meta).value("train_target", "-");
    predictor = model_predictor(*net);
  }
  ev = evaluate(predictor, *set, target, cfg.train.threshold);
  const std::vector<Scores> runs{ev.scores};
  row.summary = aggregate_runs(runs);
  const json metrics = {{"input", row.input},
                        {"train_target", row.train_target},
                        {"eval_target", target},
                        {"split", a.split},
                        {"n_samples", set->size()},
                        {"f1", ev.scores.f1},
                        {"iou", ev.scores.iou},
                        {"counts", {{"tp", ev.counts.tp}, {"fp", ev.counts.fp},
                                    {"fn", ev.counts.fn}, {"tn", ev.counts.tn}}}};
  const std::vector<ReportRow> rows{row};
  if (!cfg.paths.out.empty()) {
    const fs::path dir = cfg.paths.out;
    fs::create_directories(dir);
    write_text(dir / "metrics.json", metrics.dump(2) + "\n");
    write_text(dir / "report.txt", format_report(rows));
    if (a.save_predictions) {
      fs::create_directories(dir / "predictions");
      for (const Sample& s : *set) {
        const Mask pred = binarize(predictor(s), cfg.train.threshold);
        RstImage img;
        img.size = pred.rows();
        img.channels = {{"prediction", ResolutionClass::RC_1KM, BandKind::FIREMASK},
                        {"target", ResolutionClass::RC_1KM, BandKind::FIREMASK}};
        img.data.assign(pred.data().begin(), pred.data().end());
        const Mask& t = s.target.at(target);
        img.data.insert(img.data.end(), t.data().begin(), t.data().end());
        write_rst(dir / "predictions" / (s.key.date.iso() + "_" + cell_name(s.key.cell) + ".rst"), img);
      }
    }
    save_config(dir, cfg);
  }
  out << format_report(rows);
  return kExitOk;
}

int cmd_baseline(const Common& common, std::vector<std::string> products, const std::string& range,
                 std::ostream& out) {
  PipelineConfig cfg = resolve(common);
  require(cfg.paths.store, "--store");
  if (products.empty()) products = {cfg.products.modis, cfg.products.viirs};
  const DirectoryStore store(cfg.paths.store);
  DateRange r;
  if (!range.empty()) {
    r = parse_range(range);
  } else {
    const auto keys = store.keys();
    if (keys.empty()) throw Error(ErrorCode::empty_store, "store is empty");
    r = {keys.front().date, keys.front().date};
    for (const PatchKey& k : keys) {
      r.first = std::min(r.first, k.date);
      r.last = std::max(r.last, k.date);
    }
  }
  std::vector<ReportRow> rows;
  json doc = json::object();
  for (const std::string& p : products) {
    const Scores s = persistence_stats(store, p, r);
    const std::vector<Scores> runs{s};
    rows.push_back({"persistence", "-", p, aggregate_runs(runs)});
    doc[p] = {{"f1", s.f1}, {"iou", s.iou}, {"range", r}};
  }
  if (!cfg.paths.out.empty()) {
    fs::create_directories(cfg.paths.out);
    write_text(fs::path(cfg.paths.out) / "baseline.json", doc.dump(2) + "\n");
    write_text(fs::path(cfg.paths.out) / "report.txt", format_report(rows));
    save_config(cfg.paths.out, cfg);
  }
  out << format_report(rows);
  return kExitOk;
}

int cmd_progression(const Common& common, std::string product, const std::string& range,
                    std::optional<int> max_gap, std::ostream& out) {
  PipelineConfig cfg = resolve(common);
  require(cfg.paths.store, "--store");
  require(cfg.paths.out, "--out");
  if (product.empty()) product = cfg.products.viirs;
  if (max_gap) cfg.tracker.max_gap_days = *max_gap;
  const DirectoryStore store(cfg.paths.store);
  DateRange r;
  if (!range.empty()) {
    r = parse_range(range);
  } else {
    bool any = false;
    for (const PatchKey& k : store.keys()) {
      if (k.product != product) continue;
      if (!any) r = {k.date, k.date};
      r.first = std::min(r.first, k.date);
      r.last = std::max(r.last, k.date);
      any = true;
    }
    if (!any) throw Error(ErrorCode::empty_store, "store holds no " + product + " patches");
  }
  const auto detections = detections_from_store(store, product, r);
  const auto events = track_events(detections, cfg.tracker);
  const fs::path dir = cfg.paths.out;
  fs::create_directories(dir / "progression");
  json ev = json::array();
  for (const FireEvent& e : events) {
    std::set<CellId> cells;
    for (const Detection& d : e.detections) cells.insert(d.cell);
    ev.push_back({{"id", e.id},
                  {"ignition_date", e.ignition_date},
                  {"n_detections", e.detections.size()},
                  {"cells", std::vector<CellId>(cells.begin(), cells.end())}});
  }
  write_text(dir / "events.json", json{{"product", product}, {"range", r}, {"events", ev}}.dump(2) + "\n");
  if (!events.empty()) {
    const Region region = bounding_region(events);
    const FloatImage raster = progression_raster(events, region);
    for (const auto& [cell, plane] : cell_planes(raster, region)) {
      RstImage img;
      img.size = kTrackSize;
      img.channels = {{"days_since_ignition", ResolutionClass::RC_1KM, BandKind::WEATHER}};
      img.data = plane.data();
      write_rst(dir / "progression" / (cell_name(cell) + ".rst"), img);
    }
    write_pnm(dir / "progression.ppm", render_progression(raster, r.length() - 1));
  }
  save_config(dir, cfg);
  out << "progression: " << detections.size() << " detections, " << events.size() << " events\n";
  return kExitOk;
}

FloatImage rst_plane(const fs::path& path, const std::string& channel) {
  RstImage img;
  try {
    img = read_rst(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::unreadable_input, path.string() + ": " + e.what());
  }
  std::size_t c = 0;
  if (!channel.empty()) {
    auto it = std::find_if(img.channels.begin(), img.channels.end(),
                           [&](const BandSpec& b) { return b.name == channel; });
    if (it == img.channels.end())
      throw Error(ErrorCode::unreadable_input, path.string() + " has no channel " + channel);
    c = static_cast<std::size_t>(it - img.channels.begin());
  }
  FloatImage out(1, img.size, img.size);
  const std::size_t n = out.size();
  std::copy_n(img.data.begin() + static_cast<std::ptrdiff_t>(c * n), n, out.data().begin());
  return out;
}

struct RenderArgs {
  std::string in, mode{"mask"}, target, channel, target_channel;
  std::optional<double> max_days;
};

int cmd_render(const Common& common, const RenderArgs& a, std::ostream& out) {
  require(a.in, "--in");
  require(common.out, "--out");
  const FloatImage plane = rst_plane(a.in, a.channel);
  ByteImage img;
  if (a.mode == "mask") {
    img = render_mask(plane);
  } else if (a.mode == "progression") {
    double max_days = 0;
    for (float v : plane.data())
      if (!std::isnan(v)) max_days = std::max<double>(max_days, v);
    img = render_progression(plane, a.max_days.value_or(max_days));
  } else if (a.mode == "triptych") {
    const FloatImage target = a.target.empty() ? rst_plane(a.in, a.target_channel.empty() ? "target" : a.target_channel)
                                               : rst_plane(a.target, a.target_channel);
    img = render_triptych(plane, target);
  } else {
    throw CLI::ValidationError("--mode must be mask, progression or triptych");
  }
  fs::path path = common.out;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_pnm(path, img);
  out << "render: " << path.string() << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> metrics;
  std::optional<int> synthetic;
  std::string combos{"native"};
};

int cmd_report(const Common& common, const ReportArgs& a, std::ostream& out) {
  PipelineConfig cfg = resolve(common);
  std::vector<ReportRow> rows;
  std::string meta;
  if (a.synthetic) {
    if (*a.synthetic < 1) throw CLI::ValidationError("--synthetic needs at least one run");
    ExperimentConfig ec;
    ec.grid = cfg.grid;
    ec.campaign = cfg.campaign;
    ec.resample = cfg.resample;
    ec.products = cfg.products;
    ec.val_fraction = cfg.val_fraction;
    ec.arch = cfg.arch;
    ec.train = cfg.train;
    ec.loss = cfg.loss;
    if (a.combos == "all") ec.combos = all_combos(cfg.products);
    else if (a.combos == "native") ec.combos = native_combos(cfg.products);
    else throw CLI::ValidationError("--combos must be all or native");
    std::vector<SeedResult> results(static_cast<std::size_t>(*a.synthetic));
    parallel_for(results.size(), cfg.jobs,
                 [&](std::size_t i) { results[i] = run_seed(ec, cfg.seed + i); });
    rows = summarize(results, ec.combos);
    meta = "# runs: " + std::to_string(results.size()) + ", seeds " + std::to_string(cfg.seed) + ".." +
           std::to_string(cfg.seed + results.size() - 1) + ", cells " +
           std::to_string(ec.campaign.n_cells) + ", days " + std::to_string(ec.campaign.n_days) + "\n";
  } else {
    if (a.metrics.empty()) throw CLI::ValidationError("metrics files or --synthetic N required");
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<Scores>> groups;
    std::vector<std::tuple<std::string, std::string, std::string>> order;
    for (const std::string& p : a.metrics) {
      const json m = read_json(p);
      try {
        const auto key = std::make_tuple(m.at("input").get<std::string>(),
                                         m.at("train_target").get<std::string>(),
                                         m.at("eval_target").get<std::string>());
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back({m.at("f1").get<double>(), m.at("iou").get<double>()});
      } catch (const json::exception& e) {
        throw Error(ErrorCode::corrupt_entry, p + ": " + e.what());
      }
    }
    for (const auto& key : order)
      rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), aggregate_runs(groups[key])});
    meta = "# metrics files: " + std::to_string(a.metrics.size()) + "\n";
  }
  const std::string text = format_report(rows) + meta;
  if (!cfg.paths.out.empty()) {
    fs::create_directories(cfg.paths.out);
    write_text(fs::path(cfg.paths.out) / "report.txt", text);
    save_config(cfg.paths.out, cfg);
  }
  out << text;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"firecast: next-day fire spread pipeline", "firecast"};
  app.require_subcommand(1);
  Common common;

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "simulate a fire campaign into swaths and a store");
  add_common(s_synth, common);
  s_synth->add_option("--days", synth.days, "campaign length");
  s_synth->add_option("--cells", synth.cells, "number of grid cells");
  s_synth->add_option("--p-spread", synth.p_spread, "spread probability");
  s_synth->add_option("--burn-days", synth.burn_days, "burn duration, negative for no burnout");
  s_synth->add_flag("--static", synth.static_fire, "non-spreading fires seen by perfect sensors");
  s_synth->add_flag("--no-swaths", synth.no_swaths, "write only the patch store");

  std::string swaths, geo;
  auto* s_resample = app.add_subcommand("resample", "resample swaths and geodetic rasters into a store");
  add_common(s_resample, common);
  s_resample->add_option("--swaths", swaths, "directory of .swt files");
  s_resample->add_option("--geodetic", geo, "directory of .geo files");

  DatasetArgs ds;
  auto* s_dataset = app.add_subcommand("make-dataset", "select, split and stack samples");
  add_common(s_dataset, common);
  s_dataset->add_option("--input-sensor", ds.input_sensor, "MODIS or VIIRS");
  s_dataset->add_option("--manifest", ds.manifest, "modis, viirs, syn-modis or syn-viirs");
  s_dataset->add_option("--trainval", ds.trainval, "FIRST:LAST");
  s_dataset->add_option("--test", ds.test, "FIRST:LAST");
  s_dataset->add_option("--val-fraction", ds.val_fraction, "share of VAL cells");

  TrainArgs tr;
  auto* s_train = app.add_subcommand("train", "train the segmentation network");
  add_common(s_train, common);
  s_train->add_option("--dataset", tr.dataset, "dataset directory");
  s_train->add_option("--target", tr.target, "training target fire product");
  s_train->add_option("--epochs", tr.epochs, "maximum epochs");
  s_train->add_option("--batch", tr.batch, "batch size");
  s_train->add_option("--lr", tr.lr, "learning rate");
  s_train->add_option("--levels", tr.levels, "encoder levels");
  s_train->add_option("--width", tr.width, "first-level channels");

  EvalArgs ev;
  auto* s_eval = app.add_subcommand("evaluate", "score a checkpoint or baseline on a dataset split");
  add_common(s_eval, common);
  s_eval->add_option("--dataset", ev.dataset, "dataset directory");
  s_eval->add_option("--checkpoint", ev.checkpoint, "checkpoint file");
  s_eval->add_option("--baseline", ev.baseline, "persistence");
  s_eval->add_option("--target", ev.target, "evaluation target fire product");
  s_eval->add_option("--split", ev.split, "train, val or test");
  s_eval->add_flag("--save-predictions", ev.save_predictions, "write prediction/target rasters");

  std::vector<std::string> products;
  std::string b_range;
  auto* s_base = app.add_subcommand("baseline", "persistence statistics of fire products in a store");
  add_common(s_base, common);
  s_base->add_option("--product", products, "fire product (repeatable)");
  s_base->add_option("--range", b_range, "FIRST:LAST");

  std::string p_product, p_range;
  std::optional<int> max_gap;
  auto* s_prog = app.add_subcommand("progression", "track fires and write days-since-ignition rasters");
  add_common(s_prog, common);
  s_prog->add_option("--product", p_product, "fire product");
  s_prog->add_option("--range", p_range, "FIRST:LAST");
  s_prog->add_option("--max-gap-days", max_gap, "temporal link tolerance");

  RenderArgs rd;
  auto* s_render = app.add_subcommand("render", "render a raster to PGM/PPM");
  add_common(s_render, common);
  s_render->add_option("--in", rd.in, "input .rst");
  s_render->add_option("--mode", rd.mode, "mask, progression or triptych");
  s_render->add_option("--target", rd.target, "target .rst for triptych");
  s_render->add_option("--channel", rd.channel, "input channel name");
  s_render->add_option("--target-channel", rd.target_channel, "target channel name");
  s_render->add_option("--max-days", rd.max_days, "top of the progression colour scale");

  ReportArgs rp;
  auto* s_report = app.add_subcommand("report", "aggregate runs into the results table");
  add_common(s_report, common);
  s_report->add_option("metrics", rp.metrics, "metrics.json files from evaluate");
  s_report->add_option("--synthetic", rp.synthetic, "run N synthetic seeds end to end");
  s_report->add_option("--combos", rp.combos, "native or all");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (s_synth->parsed()) return cmd_synth(common, synth, out);
    if (s_resample->parsed()) return cmd_resample(common, swaths, geo, out);
    if (s_dataset->parsed()) return cmd_make_dataset(common, ds, out);
    if (s_train->parsed()) return cmd_train(common, tr, out);
    if (s_eval->parsed()) return cmd_evaluate(common, ev, out);
    if (s_base->parsed()) return cmd_baseline(common, products, b_range, out);
    if (s_prog->parsed()) return cmd_progression(common, p_product, p_range, max_gap, out);
    if (s_render->parsed()) return cmd_render(common, rd, out);
    if (s_report->parsed()) return cmd_report(common, rp, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace firecast
