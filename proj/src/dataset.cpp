#include "firecast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "firecast/error.hpp"
#include "firecast/hash.hpp"
#include "firecast/json_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace firecast {
namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

int fire_channel(const PatchRaster& p) {
  for (std::size_t i = 0; i < p.channels.size(); ++i)
    if (p.channels[i].kind == BandKind::FIREMASK) return static_cast<int>(i);
  throw Error(ErrorCode::corrupt_entry, "patch " + p.product + " has no fire-mask channel");
}

bool has_fire(const Mask& m) {
  return std::any_of(m.data().begin(), m.data().end(), [](std::uint8_t v) { return v != 0; });
}

/// Patch reads memoized for the duration of one sample or statistics pass.
class PatchCache {
 public:
  explicit PatchCache(const PatchStore& store) : store_(store) {}

  const PatchRaster* get(const PatchKey& key) {
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, store_.try_read(key)).first;
    return it->second ? &*it->second : nullptr;
  }
  void clear() { cache_.clear(); }

 private:
  const PatchStore& store_;
  std::map<PatchKey, std::optional<PatchRaster>> cache_;
};

/// Native-resolution plane of a manifest entry; empty when missing.
std::vector<float> entry_plane(PatchCache& cache, const ManifestEntry& e, const SampleKey& key,
                               int& size) {
  const PatchRaster* p = cache.get({e.product, key.date, e.daynight, key.cell});
  if (!p) return {};
  const int ch = p->channel_index(e.band.name);
  if (ch < 0) return {};
  size = p->size;
  const std::size_t n = static_cast<std::size_t>(size) * size;
  std::vector<float> plane(p->data.begin() + static_cast<std::ptrdiff_t>(ch * n),
                           p->data.begin() + static_cast<std::ptrdiff_t>((ch + 1) * n));
  if (e.band.kind == BandKind::FIREMASK)
    for (float& v : plane)
      if (!std::isnan(v)) v = is_fire_value(v) ? 1.0f : 0.0f;
  return plane;
}

/// Per-axis overlap weights mapping `n_src` pixels onto `n_dst` pixels.
struct AxisWeights {
  std::vector<std::vector<std::pair<int, double>>> taps;
};

AxisWeights bilinear_axis(int n_src, int n_dst) {
  AxisWeights a;
  a.taps.resize(n_dst);
  for (int d = 0; d < n_dst; ++d) {
    double s = (d + 0.5) * n_src / n_dst - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(n_src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const double f = s - i0;
    a.taps[d].push_back({i0, 1.0 - f});
    if (f > 0 && i0 + 1 < n_src) a.taps[d].push_back({i0 + 1, f});
  }
  return a;
}

AxisWeights area_axis(int n_src, int n_dst) {
  AxisWeights a;
  a.taps.resize(n_dst);
  const double scale = static_cast<double>(n_src) / n_dst;
  for (int d = 0; d < n_dst; ++d) {
    const double lo = d * scale;
    const double hi = (d + 1) * scale;
    for (int i = static_cast<int>(std::floor(lo)); i < n_src && i < hi; ++i) {
      const double w = std::min<double>(hi, i + 1) - std::max<double>(lo, i);
      if (w > 1e-12) a.taps[d].push_back({i, w});
    }
  }
  return a;
}

}  // namespace

bool operator<(const SampleKey& a, const SampleKey& b) {
  return std::tie(a.date, a.cell.y, a.cell.x) < std::tie(b.date, b.cell.y, b.cell.x);
}

const char* to_string(Split s) {
  switch (s) {
    case Split::TRAIN: return "train";
    case Split::VAL: return "val";
    case Split::TEST: return "test";
  }
  return "?";
}

double split_uniform(CellId cell, std::uint64_t seed) {
  return hash_uniform({static_cast<std::uint64_t>(static_cast<std::uint32_t>(cell.x)),
                       static_cast<std::uint64_t>(static_cast<std::uint32_t>(cell.y)), seed});
}

Split SplitAssignment::of(CellId c) const {
  auto it = cells.find(c);
  if (it != cells.end()) return it->second;
  return split_uniform(c, seed) < val_fraction ? Split::VAL : Split::TRAIN;
}

SplitAssignment split_cells(std::span<const CellId> cells, std::uint64_t seed, double val_fraction) {
  if (!(val_fraction > 0 && val_fraction < 1))
    throw Error(ErrorCode::invalid_argument, "val_fraction must lie in (0, 1)");
  SplitAssignment out;
  out.seed = seed;
  out.val_fraction = val_fraction;
  for (CellId c : cells)
    out.cells[c] = split_uniform(c, seed) < val_fraction ? Split::VAL : Split::TRAIN;
  return out;
}

ChannelManifest default_manifest(std::string_view sensor) {
  ChannelManifest m;
  m.name = sensor == kModis ? "modis" : "viirs";
  const std::string s(sensor);
  for (DayNight dn : {DayNight::DAY, DayNight::NIGHT})
    for (const BandSpec& b : band_manifest(sensor, dn)) m.entries.push_back({product_for(s, b), b, dn});
  const BandSpec fire = fire_mask_band(sensor);
  for (DayNight dn : {DayNight::DAY, DayNight::NIGHT})
    m.entries.push_back({fire_product(sensor), fire, dn});
  for (const BandSpec& b : weather_bands()) m.entries.push_back({"ERA5", b, DayNight::DAY});
  m.entries.push_back({"KBDI", drought_band(), DayNight::DAY});
  const std::size_t total = sensor == kModis ? 65 : 43;
  for (int k = 0; m.entries.size() < total; ++k)
    m.entries.push_back({std::string(kPadProduct),
                         {"zero" + std::to_string(k), ResolutionClass::RC_GEODETIC, BandKind::WEATHER},
                         DayNight::DAY});
  return m;
}

ChannelManifest synthetic_manifest(std::string_view sensor) {
  ChannelManifest m;
  const bool modis = sensor == kModis;
  if (!modis && sensor != kViirs)
    throw Error(ErrorCode::unknown_sensor, "unknown sensor '" + std::string(sensor) + "'");
  m.name = modis ? "syn-modis" : "syn-viirs";
  const BandSpec proxy = modis ? BandSpec{"B21", ResolutionClass::RC_1KM, BandKind::EMISSIVE}
                               : BandSpec{"I4", ResolutionClass::RC_375M, BandKind::EMISSIVE};
  const std::string s(sensor);
  for (DayNight dn : {DayNight::DAY, DayNight::NIGHT}) m.entries.push_back({product_for(s, proxy), proxy, dn});
  for (DayNight dn : {DayNight::DAY, DayNight::NIGHT})
    m.entries.push_back({fire_product(sensor), fire_mask_band(sensor), dn});
  return m;
}

ChannelManifest manifest_by_name(std::string_view name) {
  if (name == "modis") return default_manifest(kModis);
  if (name == "viirs") return default_manifest(kViirs);
  if (name == "syn-modis") return synthetic_manifest(kModis);
  if (name == "syn-viirs") return synthetic_manifest(kViirs);
  throw Error(ErrorCode::invalid_argument, "unknown manifest '" + std::string(name) + "'");
}

std::optional<Mask> daily_fire_mask(const PatchStore& store, const std::string& product,
                                    CellId cell, Date date) {
  std::optional<Mask> out;
  for (DayNight dn : {DayNight::DAY, DayNight::NIGHT}) {
    auto p = store.try_read({product, date, dn, cell});
    if (!p) continue;
    const int ch = fire_channel(*p);
    if (!out) out = Mask(1, p->size, p->size, 0);
    if (out->rows() != p->size)
      throw Error(ErrorCode::corrupt_entry, "day and night patches of " + product + " differ in size");
    for (int r = 0; r < p->size; ++r)
      for (int c = 0; c < p->size; ++c)
        if (is_fire_value(p->at(ch, r, c))) out->at(r, c) = 1;
  }
  return out;
}

Mask reduce_max(const Mask& native, int size) {
  const int n = native.rows();
  Mask out(1, size, size, 0);
  for (int i = 0; i < size; ++i) {
    const int r0 = i * n / size;
    const int r1 = std::max(r0 + 1, ((i + 1) * n + size - 1) / size);
    for (int j = 0; j < size; ++j) {
      const int c0 = j * n / size;
      const int c1 = std::max(c0 + 1, ((j + 1) * n + size - 1) / size);
      std::uint8_t v = 0;
      for (int r = r0; r < r1 && !v; ++r)
        for (int c = c0; c < c1; ++c)
          if (native.at(r, c)) {
            v = 1;
            break;
          }
      out.at(i, j) = v;
    }
  }
  return out;
}

std::vector<SampleKey> select_samples(const PatchStore& store, const FireProducts& products,
                                      DateRange range) {
  std::set<std::pair<CellId, Date>> modis_days, viirs_days;
  for (const PatchKey& k : store.keys()) {
    if (k.product == products.modis) modis_days.insert({k.cell, k.date});
    if (k.product == products.viirs) viirs_days.insert({k.cell, k.date});
  }
  if (modis_days.empty() && viirs_days.empty())
    throw Error(ErrorCode::empty_store, "store holds no " + products.modis + " or " +
                                            products.viirs + " patches");
  std::vector<SampleKey> out;
  for (const auto& [cell, date] : modis_days) {
    if (!range.contains(date) || !range.contains(date + 1)) continue;
    if (!viirs_days.count({cell, date}) || !modis_days.count({cell, date + 1}) ||
        !viirs_days.count({cell, date + 1}))
      continue;
    const auto m = daily_fire_mask(store, products.modis, cell, date);
    if (!m || !has_fire(*m)) continue;
    const auto v = daily_fire_mask(store, products.viirs, cell, date);
    if (!v || !has_fire(*v)) continue;
    out.push_back({cell, date});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Mask build_target(const PatchStore& store, const SampleKey& key, const std::string& product) {
  auto m = daily_fire_mask(store, product, key.cell, key.date + 1);
  if (!m)
    throw Error(ErrorCode::target_missing, "no " + product + " overpass on " +
                                               (key.date + 1).iso() + " for " + cell_name(key.cell));
  return reduce_max(*m);
}

Mask build_current(const PatchStore& store, const SampleKey& key, const std::string& product) {
  return build_target(store, {key.cell, key.date - 1}, product);
}

NormStats compute_norm_stats(const PatchStore& store, std::span<const SampleKey> keys,
                             const ChannelManifest& manifest) {
  const std::size_t c = manifest.size();
  std::vector<double> count(c, 0), mean(c, 0), m2(c, 0);
  PatchCache cache(store);
  for (const SampleKey& key : keys) {
    cache.clear();
    for (std::size_t i = 0; i < c; ++i) {
      const ManifestEntry& e = manifest.entries[i];
      if (e.product == kPadProduct) continue;
      int size = 0;
      for (float v : entry_plane(cache, e, key, size)) {
        if (std::isnan(v)) continue;
        // Welford update.
        count[i] += 1;
        const double d = v - mean[i];
        mean[i] += d / count[i];
        m2[i] += d * (v - mean[i]);
      }
    }
  }
  NormStats out;
  out.mean = mean;
  out.stddev.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    const double sd = count[i] > 0 ? std::sqrt(m2[i] / count[i]) : 0.0;
    out.stddev[i] = sd > 1e-12 ? sd : 1.0;
  }
  return out;
}

std::vector<float> resample_plane(std::span<const float> plane, int size, bool nearest) {
  const int n = kInputSize;
  std::vector<float> out(static_cast<std::size_t>(n) * n, kNaN);
  if (size == n) {
    std::copy(plane.begin(), plane.end(), out.begin());
    return out;
  }
  if (nearest) {
    for (int r = 0; r < n; ++r) {
      const int sr = static_cast<int>((r + 0.5) * size / n);
      for (int c = 0; c < n; ++c)
        out[static_cast<std::size_t>(r) * n + c] =
            plane[static_cast<std::size_t>(sr) * size + static_cast<int>((c + 0.5) * size / n)];
    }
    return out;
  }
  const AxisWeights ax = size < n ? bilinear_axis(size, n) : area_axis(size, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double num = 0, den = 0;
      for (const auto& [sr, wr] : ax.taps[r])
        for (const auto& [sc, wc] : ax.taps[c]) {
          const float v = plane[static_cast<std::size_t>(sr) * size + sc];
          if (std::isnan(v)) continue;
          num += wr * wc * v;
          den += wr * wc;
        }
      if (den > 0) out[static_cast<std::size_t>(r) * n + c] = static_cast<float>(num / den);
    }
  return out;
}

FloatImage build_input(const PatchStore& store, const SampleKey& key,
                       const ChannelManifest& manifest, const NormStats& stats, Mask* nodata) {
  const int n = kInputSize;
  const int channels = static_cast<int>(manifest.size());
  if (stats.mean.size() != manifest.size() || stats.stddev.size() != manifest.size())
    throw Error(ErrorCode::channel_mismatch, "normalization statistics do not match the manifest");
  FloatImage input(channels, n, n, 0.0f);
  Mask missing(1, n, n, 0);
  PatchCache cache(store);
  bool any = false;
  for (int ch = 0; ch < channels; ++ch) {
    const ManifestEntry& e = manifest.entries[ch];
    if (e.product == kPadProduct) continue;
    int size = 0;
    std::vector<float> native = entry_plane(cache, e, key, size);
    auto dst = input.plane(ch);
    if (native.empty()) {
      std::fill(missing.data().begin(), missing.data().end(), 1);
      continue;
    }
    any = true;
    const std::vector<float> up = resample_plane(native, size, e.band.kind == BandKind::FIREMASK);
    const double mu = stats.mean[ch];
    const double sd = stats.stddev[ch];
    for (std::size_t i = 0; i < up.size(); ++i) {
      if (std::isnan(up[i])) {
        dst[i] = 0.0f;
        missing.data()[i] = 1;
      } else {
        dst[i] = static_cast<float>((up[i] - mu) / sd);
      }
    }
  }
  if (!any)
    throw Error(ErrorCode::not_found, "no input patches for " + cell_name(key.cell) + " on " +
                                          key.date.iso());
  if (nodata) *nodata = std::move(missing);
  return input;
}

Dataset build_dataset(const PatchStore& store, const DatasetConfig& cfg) {
  if (cfg.trainval.first <= cfg.test.last && cfg.test.first <= cfg.trainval.last)
    throw Error(ErrorCode::invalid_argument, "test dates must be disjoint from train/val dates");
  Dataset ds;
  ds.config = cfg;
  const auto tv_keys = select_samples(store, cfg.products, cfg.trainval);
  const auto test_keys = select_samples(store, cfg.products, cfg.test);
  std::set<CellId> cell_set;
  for (const auto& k : tv_keys) cell_set.insert(k.cell);
  const std::vector<CellId> cells(cell_set.begin(), cell_set.end());
  ds.split = split_cells(cells, cfg.split_seed, cfg.val_fraction);

  std::vector<SampleKey> train_keys, val_keys;
  for (const auto& k : tv_keys)
    (ds.split.of(k.cell) == Split::VAL ? val_keys : train_keys).push_back(k);
  ds.stats = compute_norm_stats(store, train_keys, cfg.manifest);

  auto assemble = [&](const std::vector<SampleKey>& keys, std::vector<Sample>& out) {
    for (const auto& k : keys) {
      Sample s;
      s.key = k;
      s.input = build_input(store, k, cfg.manifest, ds.stats, &s.nodata_mask);
      for (const std::string& prod : {cfg.products.modis, cfg.products.viirs}) {
        s.target[prod] = build_target(store, k, prod);
        s.current[prod] = build_current(store, k, prod);
      }
      out.push_back(std::move(s));
    }
  };
  assemble(train_keys, ds.train);
  assemble(val_keys, ds.val);
  assemble(test_keys, ds.test);
  return ds;
}

// --- persistence -----------------------------------------------------------

namespace {

RstImage mask_image(const std::map<std::string, Mask>& masks) {
  RstImage img;
  img.size = kTargetSize;
  for (const auto& [prod, m] : masks) {
    img.channels.push_back({prod, ResolutionClass::RC_1KM, BandKind::FIREMASK});
    img.data.insert(img.data.end(), m.data().begin(), m.data().end());
  }
  return img;
}

std::map<std::string, Mask> masks_from_image(const RstImage& img) {
  std::map<std::string, Mask> out;
  const std::size_t n = static_cast<std::size_t>(img.size) * img.size;
  for (std::size_t c = 0; c < img.channels.size(); ++c) {
    Mask m(1, img.size, img.size, 0);
    for (std::size_t i = 0; i < n; ++i) m.data()[i] = img.data[c * n + i] != 0.0f;
    out.emplace(img.channels[c].name, std::move(m));
  }
  return out;
}

std::string sample_stem(const SampleKey& k) { return k.date.iso() + "_" + cell_name(k.cell); }

json keys_json(const std::vector<Sample>& samples) {
  json arr = json::array();
  for (const auto& s : samples) arr.push_back({{"cell", s.key.cell}, {"date", s.key.date}});
  return arr;
}

}  // namespace

void save_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir / "samples");
  json manifest = json::array();
  for (const auto& e : ds.config.manifest.entries)
    manifest.push_back({{"product", e.product},
                        {"band", e.band},
                        {"daynight", daynight_letter(e.daynight) == 'D' ? "D" : "N"}});
  json split = json::array();
  for (const auto& [cell, s] : ds.split.cells) split.push_back({{"cell", cell}, {"split", to_string(s)}});
  json doc = {
      {"format", "firecast-dataset"},
      {"version", 1},
      {"input_sensor", ds.config.input_sensor},
      {"manifest", {{"name", ds.config.manifest.name},
                    {"version", ds.config.manifest.version},
                    {"entries", manifest}}},
      {"products", {{"modis", ds.config.products.modis}, {"viirs", ds.config.products.viirs}}},
      {"trainval", ds.config.trainval},
      {"test", ds.config.test},
      {"split_seed", ds.config.split_seed},
      {"val_fraction", ds.config.val_fraction},
      {"split", split},
      {"norm", {{"mean", ds.stats.mean}, {"stddev", ds.stats.stddev}}},
      {"samples", {{"train", keys_json(ds.train)}, {"val", keys_json(ds.val)}, {"test", keys_json(ds.test)}}},
  };
  for (const auto* part : {&ds.train, &ds.val, &ds.test})
    for (const Sample& s : *part) {
      const fs::path stem = dir / "samples" / sample_stem(s.key);
      RstImage in;
      in.size = kInputSize;
      for (const auto& e : ds.config.manifest.entries) in.channels.push_back(e.band);
      in.data = s.input.data();
      write_rst(stem.string() + ".input.rst", in);
      RstImage nd;
      nd.size = kInputSize;
      nd.channels = {{"nodata", ResolutionClass::RC_375M, BandKind::FIREMASK}};
      nd.data.assign(s.nodata_mask.data().begin(), s.nodata_mask.data().end());
      write_rst(stem.string() + ".nodata.rst", nd);
      write_rst(stem.string() + ".target.rst", mask_image(s.target));
      write_rst(stem.string() + ".current.rst", mask_image(s.current));
    }
  std::ofstream(dir / "dataset.json") << doc.dump(2) << '\n';
}

Dataset load_dataset(const fs::path& dir) {
  std::ifstream in(dir / "dataset.json");
  if (!in) throw Error(ErrorCode::not_found, "no dataset.json in " + dir.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt_entry, std::string("dataset.json: ") + e.what());
  }
  Dataset ds;
  try {
    ds.config.input_sensor = doc.at("input_sensor").get<std::string>();
    ds.config.manifest.name = doc.at("manifest").at("name").get<std::string>();
    ds.config.manifest.version = doc.at("manifest").at("version").get<int>();
    for (const auto& e : doc.at("manifest").at("entries"))
      ds.config.manifest.entries.push_back(
          {e.at("product").get<std::string>(), e.at("band").get<BandSpec>(),
           e.at("daynight").get<std::string>() == "D" ? DayNight::DAY : DayNight::NIGHT});
    ds.config.products.modis = doc.at("products").at("modis").get<std::string>();
    ds.config.products.viirs = doc.at("products").at("viirs").get<std::string>();
    ds.config.trainval = doc.at("trainval").get<DateRange>();
    ds.config.test = doc.at("test").get<DateRange>();
    ds.config.split_seed = doc.at("split_seed").get<std::uint64_t>();
    ds.config.val_fraction = doc.at("val_fraction").get<double>();
    ds.split.seed = ds.config.split_seed;
    ds.split.val_fraction = ds.config.val_fraction;
    for (const auto& s : doc.at("split"))
      ds.split.cells[s.at("cell").get<CellId>()] =
          s.at("split").get<std::string>() == "val" ? Split::VAL : Split::TRAIN;
    ds.stats.mean = doc.at("norm").at("mean").get<std::vector<double>>();
    ds.stats.stddev = doc.at("norm").at("stddev").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::corrupt_entry, std::string("dataset.json: ") + e.what());
  }
  auto load_part = [&](const char* name, std::vector<Sample>& out) {
    for (const auto& k : doc.at("samples").at(name)) {
      Sample s;
      s.key = {k.at("cell").get<CellId>(), k.at("date").get<Date>()};
      const std::string stem = (dir / "samples" / sample_stem(s.key)).string();
      RstImage img = read_rst(stem + ".input.rst");
      if (img.size != kInputSize || img.channels.size() != ds.config.manifest.size())
        throw Error(ErrorCode::corrupt_entry, stem + ".input.rst does not match the manifest");
      s.input = FloatImage(static_cast<int>(img.channels.size()), img.size, img.size);
      s.input.data() = std::move(img.data);
      RstImage nd = read_rst(stem + ".nodata.rst");
      s.nodata_mask = Mask(1, nd.size, nd.size, 0);
      for (std::size_t i = 0; i < nd.data.size(); ++i) s.nodata_mask.data()[i] = nd.data[i] != 0.0f;
      s.target = masks_from_image(read_rst(stem + ".target.rst"));
      s.current = masks_from_image(read_rst(stem + ".current.rst"));
      out.push_back(std::move(s));
    }
  };
  load_part("train", ds.train);
  load_part("val", ds.val);
  load_part("test", ds.test);
  return ds;
}

}  // namespace firecast
