#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "firecast/dataset.hpp"
#include "firecast/error.hpp"
#include "firecast/hash.hpp"
#include "firecast/pipeline.hpp"
#include "firecast/synthgen.hpp"

using namespace firecast;

namespace {

const Date kD0 = Date::from_ymd(2019, 12, 1);
const float kNaN = std::numeric_limits<float>::quiet_NaN();

PatchRaster mask_patch(const std::string& sensor, CellId cell, Date date, DayNight dn,
                       std::initializer_list<std::pair<int, int>> fire) {
  PatchRaster p;
  p.channels = {fire_mask_band(sensor)};
  p.product = fire_product(sensor);
  p.cell = cell;
  p.date = date;
  p.daynight = dn;
  p.size = patch_size_for(p.channels[0].resolution);
  p.data.assign(static_cast<std::size_t>(p.size) * p.size, kClassNonFireLand);
  for (auto [r, c] : fire) p.at(0, r, c) = kClassFireNominal;
  return p;
}

void put_both(MemoryStore& s, CellId cell, Date date, bool modis_fire, bool viirs_fire) {
  for (DayNight dn : {DayNight::DAY, DayNight::NIGHT}) {
    s.write(mask_patch("MODIS", cell, date, dn, {}));
    s.write(mask_patch("VIIRS", cell, date, dn, {}));
  }
  if (modis_fire) s.write(mask_patch("MODIS", cell, date, DayNight::DAY, {{3, 4}}));
  if (viirs_fire) s.write(mask_patch("VIIRS", cell, date, DayNight::NIGHT, {{30, 40}}));
}

int count(const Mask& m) {
  int n = 0;
  for (auto v : m.data()) n += v;
  return n;
}

}  // namespace

TEST(Split, DeterministicOrderIndependentAndFraction) {
  std::vector<CellId> cells;
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x) cells.push_back({x, y});
  SplitAssignment a = split_cells(cells, 17);
  SplitAssignment b = split_cells(cells, 17);
  EXPECT_EQ(a.cells, b.cells);
  std::vector<CellId> shuffled = cells;
  SplitMixStream rng(3);
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
  EXPECT_EQ(split_cells(shuffled, 17).cells, a.cells);
  std::vector<CellId> half(cells.begin(), cells.begin() + 5000);
  SplitAssignment h = split_cells(half, 17);
  for (CellId c : half) EXPECT_EQ(h.of(c), a.of(c));
  int val = 0;
  for (auto& [c, s] : a.cells) {
    val += s == Split::VAL;
    EXPECT_EQ(s == Split::VAL, split_uniform(c, 17) < 0.25);
  }
  EXPECT_GE(val / 10000.0, 0.235);
  EXPECT_LE(val / 10000.0, 0.265);
  EXPECT_NE(split_cells(cells, 18).cells, a.cells);
}

TEST(Manifest, DefaultSizes) {
  EXPECT_EQ(default_manifest(kModis).size(), 65u);
  EXPECT_EQ(default_manifest(kViirs).size(), 43u);
  EXPECT_EQ(synthetic_manifest(kModis).size(), 4u);
  EXPECT_EQ(manifest_by_name("viirs").size(), 43u);
  EXPECT_THROW(manifest_by_name("goes"), Error);
  for (const auto& e : default_manifest(kViirs).entries)
    if (e.daynight == DayNight::NIGHT) EXPECT_NE(e.band.kind, BandKind::REFLECTIVE);
}

TEST(Select, RequiresFireInBothProducts) {
  MemoryStore s;
  put_both(s, {1, 1}, kD0, true, true);
  put_both(s, {2, 1}, kD0, true, false);
  put_both(s, {3, 1}, kD0, false, true);
  put_both(s, {4, 1}, kD0, false, false);
  for (int x = 1; x <= 4; ++x) put_both(s, {x, 1}, kD0 + 1, false, false);
  auto keys = select_samples(s, {}, {kD0, kD0 + 1});
  ASSERT_EQ(keys.size(), 1u);
  EXPECT_EQ(keys[0].cell, (CellId{1, 1}));
  EXPECT_EQ(keys[0].date, kD0);
}

TEST(Select, NextDayMustExistAndBeInRange) {
  MemoryStore s;
  put_both(s, {1, 1}, kD0, true, true);
  EXPECT_TRUE(select_samples(s, {}, {kD0, kD0 + 1}).empty());
  put_both(s, {1, 1}, kD0 + 1, false, false);
  EXPECT_TRUE(select_samples(s, {}, {kD0, kD0}).empty());
  EXPECT_EQ(select_samples(s, {}, {kD0, kD0 + 1}).size(), 1u);
}

TEST(Select, EmptyStore) {
  MemoryStore s;
  try {
    select_samples(s, {}, {kD0, kD0 + 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_store);
  }
}

namespace {

MemoryStore& synthetic_store() {
  static MemoryStore store;
  static bool ready = false;
  if (!ready) {
    CampaignConfig cfg;
    cfg.n_days = 8;
    cfg.n_cells = 3;
    cfg.grid_px = 192;
    cfg.p_spread = 0.3;
    cfg.ignitions_per_cell = 2;
    cfg.seed = 5;
    Campaign c = generate_campaign(cfg, GeoGrid{});
    resample_into(c.swaths, c.geodetic, GeoGrid{}, {}, store);
    ready = true;
  }
  return store;
}

bool has_fire(const PatchStore& s, const std::string& product, CellId cell, Date d) {
  bool any = false;
  for (DayNight dn : {DayNight::DAY, DayNight::NIGHT}) {
    auto p = s.try_read({product, d, dn, cell});
    if (!p) continue;
    for (float v : p->data) any = any || (v >= 7 && v <= 9);
  }
  return any;
}

bool has_any(const PatchStore& s, const std::string& product, CellId cell, Date d) {
  return s.contains({product, d, DayNight::DAY, cell}) || s.contains({product, d, DayNight::NIGHT, cell});
}

}  // namespace

TEST(Select, MatchesExhaustiveStoreScan) {
  const PatchStore& s = synthetic_store();
  const DateRange range{Date::from_ymd(2019, 10, 1), Date::from_ymd(2019, 10, 8)};
  std::set<CellId> cells;
  for (const auto& k : s.keys()) cells.insert(k.cell);
  std::vector<SampleKey> want;
  for (Date d = range.first; d < range.last; d = d + 1)
    for (CellId c : cells)
      if (has_fire(s, "MOD14", c, d) && has_fire(s, "VNP14IMG", c, d) &&
          has_any(s, "MOD14", c, d + 1) && has_any(s, "VNP14IMG", c, d + 1))
        want.push_back({c, d});
  std::sort(want.begin(), want.end());
  auto got = select_samples(s, {}, range);
  EXPECT_FALSE(got.empty());
  EXPECT_EQ(got, want);
}

TEST(Target, NightOnlyFireCounts) {
  MemoryStore s;
  s.write(mask_patch("MODIS", {0, 0}, kD0 + 1, DayNight::DAY, {}));
  s.write(mask_patch("MODIS", {0, 0}, kD0 + 1, DayNight::NIGHT, {{10, 20}}));
  Mask t = build_target(s, {{0, 0}, kD0}, "MOD14");
  EXPECT_EQ(t.rows(), 64);
  EXPECT_EQ(count(t), 1);
  EXPECT_EQ(t.at(10, 20), 1);
}

TEST(Target, BlockIndexFor192) {
  for (auto [r, c] : {std::pair{0, 0}, {191, 191}, {100, 5}, {47, 148}}) {
    MemoryStore s;
    s.write(mask_patch("VIIRS", {0, 0}, kD0 + 1, DayNight::DAY, {{r, c}}));
    Mask t = build_target(s, {{0, 0}, kD0}, "VNP14IMG");
    EXPECT_EQ(count(t), 1);
    EXPECT_EQ(t.at(r / 3, c / 3), 1);
  }
}

TEST(Target, EmptyAndMissing) {
  MemoryStore s;
  s.write(mask_patch("VIIRS", {0, 0}, kD0 + 1, DayNight::DAY, {}));
  s.write(mask_patch("VIIRS", {0, 0}, kD0 + 1, DayNight::NIGHT, {}));
  EXPECT_EQ(count(build_target(s, {{0, 0}, kD0}, "VNP14IMG")), 0);
  try {
    build_target(s, {{0, 0}, kD0 + 3}, "VNP14IMG");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::target_missing);
  }
}

TEST(Target, Monotone) {
  SplitMixStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    MemoryStore a, b;
    PatchRaster day = mask_patch("VIIRS", {0, 0}, kD0 + 1, DayNight::DAY, {});
    for (int i = 0; i < 30; ++i) day.at(0, static_cast<int>(rng.below(192)), static_cast<int>(rng.below(192))) = 9;
    a.write(day);
    day.at(0, static_cast<int>(rng.below(192)), static_cast<int>(rng.below(192))) = 7;
    b.write(day);
    Mask ta = build_target(a, {{0, 0}, kD0}, "VNP14IMG");
    Mask tb = build_target(b, {{0, 0}, kD0}, "VNP14IMG");
    for (std::size_t i = 0; i < ta.size(); ++i)
      if (ta.data()[i]) ASSERT_TRUE(tb.data()[i]);
  }
}

TEST(Upsample, ConstantPreserved) {
  for (int size : {64, 96, 128, 256}) {
    std::vector<float> plane(static_cast<std::size_t>(size) * size, 2.5f);
    for (float v : resample_plane(plane, size, false)) ASSERT_FLOAT_EQ(v, 2.5f);
  }
}

TEST(Upsample, BilinearSinglePixel) {
  std::vector<float> plane(64 * 64, 0.0f);
  const int i = 20, j = 41;
  plane[i * 64 + j] = 1.0f;
  auto up = resample_plane(plane, 64, false);
  // Reference: half-pixel-centred bilinear with edge clamping.
  auto src = [&](int r, int c) { return plane[std::clamp(r, 0, 63) * 64 + std::clamp(c, 0, 63)]; };
  float best = -1;
  int br = -1, bc = -1;
  for (int r = 0; r < 192; ++r)
    for (int c = 0; c < 192; ++c) {
      const double y = std::clamp((r + 0.5) / 3 - 0.5, 0.0, 63.0);
      const double x = std::clamp((c + 0.5) / 3 - 0.5, 0.0, 63.0);
      const int y0 = static_cast<int>(y), x0 = static_cast<int>(x);
      const double fy = y - y0, fx = x - x0;
      const double want = (1 - fy) * ((1 - fx) * src(y0, x0) + fx * src(y0, x0 + 1)) +
                          fy * ((1 - fx) * src(y0 + 1, x0) + fx * src(y0 + 1, x0 + 1));
      ASSERT_NEAR(up[r * 192 + c], want, 1e-6);
      if (up[r * 192 + c] > best) best = up[r * 192 + c], br = r, bc = c;
    }
  EXPECT_EQ(br / 3, i);
  EXPECT_EQ(bc / 3, j);
}

TEST(Upsample, AreaAverageFor256AndNearestForMasks) {
  std::vector<float> plane(256 * 256);
  for (int r = 0; r < 256; ++r)
    for (int c = 0; c < 256; ++c) plane[r * 256 + c] = static_cast<float>(r + c);
  auto down = resample_plane(plane, 256, false);
  double mean_in = 0, mean_out = 0;
  for (float v : plane) mean_in += v;
  for (float v : down) mean_out += v;
  EXPECT_NEAR(mean_in / plane.size(), mean_out / down.size(), 1e-3);
  std::vector<float> mask(64 * 64, 0.0f);
  mask[5 * 64 + 6] = 1.0f;
  auto up = resample_plane(mask, 64, true);
  for (int r = 0; r < 192; ++r)
    for (int c = 0; c < 192; ++c)
      ASSERT_EQ(up[r * 192 + c], (r / 3 == 5 && c / 3 == 6) ? 1.0f : 0.0f);
}

TEST(Input, MissingNightOverpassZeroedAndFlagged) {
  MemoryStore s;
  ChannelManifest m = synthetic_manifest(kViirs);
  // Only the day entries exist.
  for (const auto& e : m.entries) {
    if (e.daynight != DayNight::DAY) continue;
    PatchRaster p;
    p.product = e.product;
    p.cell = {2, 2};
    p.date = kD0;
    p.daynight = DayNight::DAY;
    p.channels = {e.band};
    p.size = patch_size_for(e.band.resolution);
    p.data.assign(static_cast<std::size_t>(p.size) * p.size, e.band.kind == BandKind::FIREMASK ? 8.0f : 3.0f);
    s.write(p);
  }
  NormStats stats{std::vector<double>(m.size(), 1.0), std::vector<double>(m.size(), 2.0)};
  Mask nodata;
  FloatImage in = build_input(s, {{2, 2}, kD0}, m, stats, &nodata);
  EXPECT_EQ(in.channels(), 4);
  EXPECT_EQ(in.rows(), 192);
  for (int ch = 0; ch < 4; ++ch) {
    const auto& e = m.entries[ch];
    const float want = e.daynight == DayNight::NIGHT ? 0.0f
                       : e.band.kind == BandKind::FIREMASK ? 0.0f  // (1 - 1) / 2
                                                           : 1.0f;  // (3 - 1) / 2
    for (float v : in.plane(ch)) ASSERT_EQ(v, want) << ch;
  }
  EXPECT_EQ(count(nodata), 192 * 192);
  try {
    build_input(s, {{3, 3}, kD0}, m, stats, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_found);
  }
}

TEST(Input, NormStatsFromTrainKeys) {
  MemoryStore s;
  ChannelManifest m;
  m.name = "one";
  m.entries = {{"VNP02IMG", {"I4", ResolutionClass::RC_375M, BandKind::EMISSIVE}, DayNight::DAY}};
  for (int k = 0; k < 2; ++k) {
    PatchRaster p;
    p.product = "VNP02IMG";
    p.cell = {k, 0};
    p.date = kD0;
    p.channels = {m.entries[0].band};
    p.size = 192;
    p.data.assign(192 * 192, k == 0 ? 1.0f : 3.0f);
    p.data[0] = kNaN;
    s.write(p);
  }
  std::vector<SampleKey> keys{{{0, 0}, kD0}, {{1, 0}, kD0}};
  NormStats st = compute_norm_stats(s, keys, m);
  EXPECT_NEAR(st.mean[0], 2.0, 1e-9);
  EXPECT_NEAR(st.stddev[0], 1.0, 1e-9);
  std::vector<SampleKey> one{{{0, 0}, kD0}};
  NormStats flat = compute_norm_stats(s, one, m);
  EXPECT_EQ(flat.stddev[0], 1.0);  // zero variance falls back to unit scale
  Mask nodata;
  FloatImage in = build_input(s, {{1, 0}, kD0}, m, st, &nodata);
  EXPECT_EQ(in.at(0, 0, 0), 0.0f);
  EXPECT_EQ(nodata.at(0, 0), 1);
  EXPECT_EQ(in.at(0, 5, 5), 1.0f);
  EXPECT_EQ(nodata.at(5, 5), 0);
}

TEST(BuildDataset, SplitsAreDisjointAndRoundTrip) {
  const PatchStore& s = synthetic_store();
  DatasetConfig cfg;
  cfg.manifest = synthetic_manifest(kViirs);
  cfg.trainval = {Date::from_ymd(2019, 10, 1), Date::from_ymd(2019, 10, 5)};
  cfg.test = {Date::from_ymd(2019, 10, 6), Date::from_ymd(2019, 10, 8)};
  cfg.val_fraction = 0.5;
  Dataset ds = build_dataset(s, cfg);
  std::set<CellId> train_cells, val_cells;
  for (const auto& x : ds.train) train_cells.insert(x.key.cell);
  for (const auto& x : ds.val) val_cells.insert(x.key.cell);
  for (CellId c : train_cells) EXPECT_FALSE(val_cells.count(c));
  for (const auto& x : ds.test) EXPECT_TRUE(cfg.test.contains(x.key.date));
  for (const auto& x : ds.train) {
    EXPECT_TRUE(cfg.trainval.contains(x.key.date + 1));
    EXPECT_EQ(x.input.channels(), 4);
    EXPECT_EQ(x.target.at("MOD14").rows(), 64);
  }

  const auto dir = std::filesystem::temp_directory_path() / "firecast_dataset_rt";
  std::filesystem::remove_all(dir);
  save_dataset(ds, dir);
  Dataset back = load_dataset(dir);
  ASSERT_EQ(back.train.size(), ds.train.size());
  ASSERT_EQ(back.test.size(), ds.test.size());
  EXPECT_EQ(back.stats.mean, ds.stats.mean);
  EXPECT_EQ(back.split.cells, ds.split.cells);
  for (std::size_t i = 0; i < ds.train.size(); ++i) {
    EXPECT_EQ(back.train[i].key, ds.train[i].key);
    EXPECT_EQ(back.train[i].input, ds.train[i].input);
    EXPECT_EQ(back.train[i].target, ds.train[i].target);
    EXPECT_EQ(back.train[i].current, ds.train[i].current);
  }
  std::filesystem::remove_all(dir);

  cfg.test = {Date::from_ymd(2019, 10, 5), Date::from_ymd(2019, 10, 8)};
  EXPECT_THROW(build_dataset(s, cfg), Error);
}
