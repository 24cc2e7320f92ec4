// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on FAIL.
//   acceptance --criterion N     run one criterion
//   acceptance                   run all of them

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "firecast/binio.hpp"
#include "firecast/cli.hpp"
#include "firecast/dataset.hpp"
#include "firecast/eval.hpp"
#include "firecast/hash.hpp"
#include "firecast/loss.hpp"
#include "firecast/metrics.hpp"
#include "firecast/pipeline.hpp"
#include "firecast/progression.hpp"
#include "firecast/resample.hpp"
#include "firecast/segnet.hpp"
#include "firecast/synthgen.hpp"
#include "oracles.hpp"

using namespace firecast;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- 1: metric identity ------------------------------------------------------

Outcome metric_identity() {
  const auto t0 = Clock::now();
  SplitMixStream rng(2024);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    ConfusionCounts c{rng.below(50000), rng.below(50000), rng.below(50000), rng.below(1000000)};
    if (i % 10 == 0) c.tp = 0;
    const Scores s = score(c);
    worst = std::max(worst, std::abs(s.iou - s.f1 / (2 - s.f1)));
  }
  // Published F1 / IoU pairs in percent.
  const double pairs[][2] = {{6.56, 3.39}, {19.62, 10.87}, {11.96, 6.37}, {28.57, 16.67}};
  double worst_pub = 0;
  for (const auto& p : pairs) {
    const double f = p[0] / 100;
    worst_pub = std::max(worst_pub, std::abs(100 * f / (2 - f) - p[1]));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && worst_pub <= 0.01 && t < 1.0,
          fmt("random max |iou - f1/(2-f1)| = %.2e, published pairs max dev = %.4f pp, %.3f s", worst,
              worst_pub, t)};
}

// --- 2: loss and gradients ---------------------------------------------------

Outcome loss_and_gradient() {
  const auto t0 = Clock::now();
  const std::vector<double> p{0.5, 0.5};
  const std::vector<std::uint8_t> y{1, 0};
  const double e3 = std::abs(wbce_loss(p, y, {3.0, 1e-7}).loss - 2 * std::numbers::ln2);
  const double e1 = std::abs(wbce_loss(p, y, {1.0, 1e-7}).loss - std::numbers::ln2);

  const SegNetArch arch{4, 2, 2, 3};
  const int rows = 16, cols = 16;
  SegNet<double> net(arch);
  net.init(11);
  SplitMixStream rng(12);
  for (double& v : net.params()) v += 0.1 * (rng.uniform() - 0.5);
  std::vector<double> in(static_cast<std::size_t>(arch.in_channels) * rows * cols);
  for (double& v : in) v = 2 * rng.uniform() - 1;
  std::vector<std::uint8_t> t(static_cast<std::size_t>(net.out_rows(rows)) * net.out_cols(cols));
  for (auto& v : t) v = rng.uniform() < 0.3;
  const LossSpec spec{3.0, 1e-7};
  std::vector<double> g(net.num_params(), 0.0);
  net.loss_and_grad(in, arch.in_channels, rows, cols, t, spec, g);
  const double h = 1e-4;
  std::size_t within = 0;
  double worst = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p0 = net.params()[i];
    net.params()[i] = p0 + h;
    const double lp = wbce_from_logits<double>(net.forward(in, arch.in_channels, rows, cols), t, spec);
    net.params()[i] = p0 - h;
    const double lm = wbce_from_logits<double>(net.forward(in, arch.in_channels, rows, cols), t, spec);
    net.params()[i] = p0;
    const double rel = std::abs(g[i] - (lp - lm) / (2 * h)) / (std::abs(g[i]) + 1e-8);
    worst = std::max(worst, rel);
    within += rel < 1e-4;
  }
  const double frac = static_cast<double>(within) / static_cast<double>(g.size());
  const double secs = seconds_since(t0);
  return {e3 <= 1e-9 && e1 <= 1e-9 && frac >= 0.999 && secs < 30,
          fmt("hand-value errors %.1e / %.1e, %zu/%zu params (%.2f%%) within 1e-4 (worst %.1e), %.1f s", e3,
              e1, within, g.size(), 100 * frac, worst, secs)};
}

// --- 3: resampler oracle -----------------------------------------------------

Outcome resampler_oracle() {
  const auto t0 = Clock::now();
  const GeoGrid g{};
  std::size_t nn_bad = 0, idw_bad = 0, idw_valued = 0;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CellId cell{static_cast<int>(seed * 7 % g.n_cols), static_cast<int>(seed * 13 % g.n_rows)};
    const Swath s = oracle::random_cell_swath(g, cell, 1000 + seed, 500, ResolutionClass::RC_1KM);
    ResampleParams params;
    params.radius_px = seed % 2 ? 6.0 : 2.0;
    params.power = seed % 3 ? 2.0 : 1.5;
    const PatchRaster idw = idw_resample(s, s.bands[0].spec, g, cell, params);
    const PatchRaster nn = nn_resample(s, s.bands[1].spec, g, cell, params.radius_px);
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c) {
        if (nn.at(0, r, c) != oracle::nn_pixel(s, s.bands[1].classes, g, cell, 64, r, c, params.radius_px))
          ++nn_bad;
        const double want = oracle::idw_pixel(s, s.bands[0].values, g, cell, 64, r, c, params.k_neighbors,
                                              params.power, params.radius_px);
        const double got = idw.at(0, r, c);
        if (std::isnan(want) || std::isnan(got)) {
          idw_bad += std::isnan(want) != std::isnan(got);
          continue;
        }
        ++idw_valued;
        const double rel = std::abs(got - want) / std::max(1.0, std::abs(want));
        worst = std::max(worst, rel);
        idw_bad += rel > 1e-6;
      }
  }
  const double secs = seconds_since(t0);
  return {nn_bad == 0 && idw_bad == 0 && secs < 30,
          fmt("50 swaths: NN mismatches %zu, IDW mismatches %zu over %zu valued pixels (max rel %.1e), %.1f s",
              nn_bad, idw_bad, idw_valued, worst, secs)};
}

// --- 4: synthetic ordering ---------------------------------------------------

ExperimentConfig ordering_config() {
  ExperimentConfig cfg;
  cfg.campaign.n_cells = 12;
  cfg.campaign.n_days = 30;
  cfg.campaign.modis = stochastic_modis(0.5);
  cfg.campaign.viirs = coherent_viirs();
  cfg.arch.levels = 2;
  cfg.arch.width = 4;
  cfg.train.max_epochs = 15;
  cfg.train.learning_rate = 0.05;
  cfg.train.batch_size = 2;
  cfg.combos = native_combos(cfg.products);
  return cfg;
}

Outcome synthetic_ordering() {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = ordering_config();
  const Combo stoch = cfg.combos[0], coh = cfg.combos[1];
  int a = 0, b = 0, c_mod = 0, c_vir = 0;
  double mean_model_mod = 0, mean_model_vir = 0, mean_pers_mod = 0, mean_pers_vir = 0;
  const int seeds = 5;
  for (int seed = 0; seed < seeds; ++seed) {
    const SeedResult r = run_seed(cfg, static_cast<std::uint64_t>(seed));
    const double pm = r.persistence.at(cfg.products.modis).iou;
    const double pv = r.persistence.at(cfg.products.viirs).iou;
    const double mm = r.model.at(stoch).iou, mv = r.model.at(coh).iou;
    a += pv > pm;
    b += mv > mm;
    c_mod += mm > pm;
    c_vir += mv > pv;
    mean_model_mod += mm / seeds;
    mean_model_vir += mv / seeds;
    mean_pers_mod += pm / seeds;
    mean_pers_vir += pv / seeds;
    std::printf("  seed %d: persistence IoU coherent %.3f stochastic %.3f | model IoU coherent %.3f "
                "stochastic %.3f (train %zu, val %zu, test %zu)\n",
                seed, pv, pm, mv, mm, r.n_train, r.n_val, r.n_test);
    std::fflush(stdout);
  }
  const double secs = seconds_since(t0);
  const bool c_ok = mean_model_mod > mean_pers_mod && mean_model_vir > mean_pers_vir;
  return {a == seeds && b >= 4 && c_ok && secs < 900,
          fmt("(a) %d/5 (b) %d/5 (c) mean model vs persistence: stochastic %.3f > %.3f, coherent %.3f > %.3f "
              "(per seed %d/5, %d/5), %.0f s",
              a, b, mean_model_mod, mean_pers_mod, mean_model_vir, mean_pers_vir, c_mod, c_vir, secs)};
}

// --- 5: cross-target harness -------------------------------------------------

Outcome transfer_harness() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = ordering_config();
  cfg.train.max_epochs = 1;
  cfg.combos = all_combos(cfg.products);
  const SeedResult r = run_seed(cfg, 0);
  const std::vector<SeedResult> runs{r};
  const std::vector<ReportRow> rows = summarize(runs, cfg.combos);
  const std::string table = format_report(rows);
  std::printf("%s", table.c_str());
  bool ok = r.model.size() == 8 &&
            table.rfind("Input | Training Target | Evaluation Target | F1 (%) | IoU (%)\n", 0) == 0;
  for (const Combo& c : cfg.combos)
    ok = ok && table.find(c.input_sensor + " | " + c.train_target + " | " + c.eval_target + " | ") !=
                   std::string::npos;
  const bool coh_to_stoch = table.find("VIIRS | VNP14IMG | MOD14 | ") != std::string::npos;
  return {ok && coh_to_stoch,
          fmt("%zu combinations trained and evaluated, %zu report rows, %.0f s", r.model.size(), rows.size(),
              seconds_since(t0))};
}

// --- 6: split and determinism ------------------------------------------------

std::vector<fs::path> files_under(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  std::sort(out.begin(), out.end());
  return out;
}

bool run_pipeline(const fs::path& dir, std::string& log) {
  const std::string d = dir.string();
  const std::vector<std::vector<std::string>> steps = {
      {"synth", "--days", "10", "--cells", "4", "--seed", "21", "--out", d + "/synth"},
      {"make-dataset", "--store", d + "/synth/store", "--input-sensor", "VIIRS", "--val-fraction", "0.5",
       "--seed", "21", "--out", d + "/dataset"},
      {"train", "--dataset", d + "/dataset", "--epochs", "2", "--levels", "1", "--width", "2", "--batch",
       "2", "--seed", "21", "--out", d + "/train"},
      {"evaluate", "--dataset", d + "/dataset", "--checkpoint", d + "/train/checkpoint.ckpt", "--out",
       d + "/eval"},
      {"evaluate", "--dataset", d + "/dataset", "--baseline", "persistence", "--out", d + "/baseline"},
      {"report", d + "/eval/metrics.json", d + "/baseline/metrics.json", "--out", d + "/report"},
  };
  for (const auto& args : steps) {
    std::ostringstream out, err;
    if (run_cli(args, out, err) != kExitOk) {
      log = args[0] + ": " + err.str();
      return false;
    }
  }
  return true;
}

Outcome split_and_determinism() {
  const auto t0 = Clock::now();
  std::vector<CellId> cells;
  for (int x = 0; x < 100; ++x)
    for (int y = 0; y < 100; ++y) cells.push_back({x, y});
  const SplitAssignment split = split_cells(cells, 0, 0.25);
  std::size_t val = 0;
  for (const auto& [cell, s] : split.cells) val += s == Split::VAL;
  const double frac = static_cast<double>(val) / static_cast<double>(cells.size());

  const fs::path root = fs::temp_directory_path() / "firecast_acceptance_determinism";
  fs::remove_all(root);
  std::string log;
  // Same path for both runs so paths recorded in config.json agree too.
  if (!run_pipeline(root / "run", log)) return {false, "first run failed: " + log};
  fs::rename(root / "run", root / "first");
  if (!run_pipeline(root / "run", log)) return {false, "second run failed: " + log};
  const auto fa = files_under(root / "first"), fb = files_under(root / "run");
  std::size_t differing = fa == fb ? 0 : 1;
  std::size_t stores = 0, checkpoints = 0, reports = 0;
  if (fa == fb)
    for (const fs::path& f : fa) {
      differing += binio::read_file(root / "first" / f) != binio::read_file(root / "run" / f);
      stores += f.extension() == ".rst";
      checkpoints += f.extension() == ".ckpt";
      reports += f.filename() == "report.txt";
    }
  fs::remove_all(root);
  const bool ok = std::abs(frac - 0.25) <= 0.015 && differing == 0 && stores > 0 && checkpoints > 0 &&
                  reports > 0;
  return {ok, fmt("VAL fraction %.4f on 10000 cells; rerun: %zu files (%zu patches, %zu checkpoints, %zu "
                  "reports), %zu differ, %.0f s",
                  frac, fa.size(), stores, checkpoints, reports, differing, seconds_since(t0))};
}

// --- 7: progression oracle ---------------------------------------------------

Outcome progression_oracle() {
  const auto t0 = Clock::now();
  const Date d0 = Date::from_ymd(2020, 1, 1);
  std::size_t raster_bad = 0, burned = 0;
  for (int trial = 0; trial < 3; ++trial) {
    FireSimParams sp;
    sp.grid_px = kTrackSize;
    sp.origin = {20 + trial, 10};
    sp.cells_x = 3;
    sp.cells_y = 2;
    sp.p_spread = 1.0;
    sp.burn_days = trial == 0 ? kBurnForever : 2 + trial;
    const int r0 = 17 + 30 * trial, c0 = 40 + 50 * trial;
    sp.ignitions = {{c0, r0, 0}};
    sp.seed = static_cast<std::uint64_t>(trial);
    const int days = 60;
    const FireHistory h = simulate_fire(sp, days);
    std::vector<Detection> dets;
    for (int day = 0; day < days; ++day)
      for (int r = 0; r < sp.height(); ++r)
        for (int c = 0; c < sp.width(); ++c)
          if (h.days[day].at(r, c))
            dets.push_back({{sp.origin.x + c / kTrackSize, sp.origin.y + sp.cells_y - 1 - r / kTrackSize},
                            {c % kTrackSize, r % kTrackSize},
                            d0 + day});
    const auto events = track_events(dets, {});
    if (events.size() != 1) return {false, fmt("trial %d: %zu events from one ignition", trial, events.size())};
    const Region region = bounding_region(events);
    const FloatImage raster = progression_raster(events, region);
    // Offset of the region inside the simulated block.
    const int dr = (sp.origin.y + sp.cells_y - 1 - region.y_max) * kTrackSize;
    const int dc = (region.x_min - sp.origin.x) * kTrackSize;
    std::size_t covered = 0, expected = 0;
    for (int r = 0; r < raster.rows(); ++r)
      for (int c = 0; c < raster.cols(); ++c) {
        const int want = oracle::chebyshev(r0, c0, r + dr, c + dc);
        const float got = raster.at(r, c);
        covered += !std::isnan(got);
        if (want < days) raster_bad += got != static_cast<float>(want);
        else raster_bad += !std::isnan(got);
      }
    for (int r = 0; r < sp.height(); ++r)
      for (int c = 0; c < sp.width(); ++c) expected += oracle::chebyshev(r0, c0, r, c) < days;
    burned += expected;
    raster_bad += covered != expected;
  }
  std::size_t uf_bad = 0, n_dets = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto dets = oracle::random_detections(5000 + seed, 400, 12);
    n_dets += dets.size();
    const int gap = static_cast<int>(seed % 4);
    uf_bad += oracle::partition_of(track_events(dets, {gap})) != oracle::components(dets, gap);
  }
  const double secs = seconds_since(t0);
  return {raster_bad == 0 && uf_bad == 0 && secs < 30,
          fmt("Chebyshev mismatches %zu over %zu burned pixels; union-find mismatches %zu/100 instances "
              "(%zu detections), %.1f s",
              raster_bad, burned, uf_bad, n_dets, secs)};
}

const std::vector<std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {"metric identity", metric_identity},
    {"loss values and gradient check", loss_and_gradient},
    {"resampler oracle equivalence", resampler_oracle},
    {"synthetic ordering", synthetic_ordering},
    {"cross-target harness", transfer_harness},
    {"split fraction and determinism", split_and_determinism},
    {"progression oracle", progression_oracle},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) which.push_back(std::atoi(argv[++i]));
    else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
      return 2;
    }
  }
  if (which.empty())
    for (int n = 1; n <= static_cast<int>(kCriteria.size()); ++n) which.push_back(n);
  bool all = true;
  for (int n : which) {
    if (n < 1 || n > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    const auto& [name, fn] = kCriteria[static_cast<std::size_t>(n - 1)];
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %s: %s (%s)\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
