#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "firecast/bands.hpp"
#include "firecast/date.hpp"
#include "firecast/grid.hpp"
#include "firecast/image.hpp"
#include "firecast/patch_store.hpp"

namespace firecast {

inline constexpr int kInputSize = 192;
inline constexpr int kTargetSize = 64;

/// One sample: inputs from day `date`, targets from day `date + 1`.
struct SampleKey {
  CellId cell;
  Date date;

  bool operator==(const SampleKey&) const = default;
};
/// Sample order: (date, y, x).
bool operator<(const SampleKey& a, const SampleKey& b);

enum class Split : std::uint8_t { TRAIN, VAL, TEST };
const char* to_string(Split s);

/// Uniform hash of a cell to [0, 1), independent of enumeration order.
double split_uniform(CellId cell, std::uint64_t seed);

struct SplitAssignment {
  std::map<CellId, Split> cells;  // TRAIN or VAL
  std::uint64_t seed = 0;
  double val_fraction = 0.25;

  Split of(CellId c) const;
};

/// cell -> VAL iff split_uniform(cell, seed) < val_fraction.
SplitAssignment split_cells(std::span<const CellId> cells, std::uint64_t seed,
                            double val_fraction = 0.25);

struct ManifestEntry {
  std::string product;
  BandSpec band;
  DayNight daynight = DayNight::DAY;

  bool operator==(const ManifestEntry&) const = default;
};

/// Ordered, versioned list of input channels for one sensor configuration.
struct ChannelManifest {
  std::string name;
  int version = 1;
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
};

/// Product name of the constant zero channels that complete a manifest.
inline constexpr std::string_view kPadProduct = "PAD";

/// Sensor day bands, night emissive bands, day and night fire masks, eight
/// reanalysis weather variables, the drought index, then zero padding:
/// 65 channels for MODIS, 43 for VIIRS.
ChannelManifest default_manifest(std::string_view sensor);
/// Compact manifest for synthetic campaigns: emissive proxy band and fire
/// mask, day and night.
ChannelManifest synthetic_manifest(std::string_view sensor);
/// "modis", "viirs", "syn-modis", "syn-viirs". Throws Error(invalid_argument).
ChannelManifest manifest_by_name(std::string_view name);

/// Fire products playing the two roles in sample selection.
struct FireProducts {
  std::string modis{"MOD14"};
  std::string viirs{"VNP14IMG"};
};

/// Day/night max-aggregated binary fire mask at native resolution, or
/// nullopt when neither overpass exists.
std::optional<Mask> daily_fire_mask(const PatchStore& store, const std::string& product,
                                    CellId cell, Date date);

/// Block max-pooling of a native-resolution mask to size x size.
Mask reduce_max(const Mask& native, int size = kTargetSize);

/// Keys (cell, t) with t and t+1 in `range`, fire in both products on day t
/// and both products present on day t+1. Sorted by (date, y, x).
/// Throws Error(empty_store) when the store holds neither product.
std::vector<SampleKey> select_samples(const PatchStore& store, const FireProducts& products,
                                      DateRange range);

/// Next-day target: binarized day OR night mask, max-pooled to 64x64.
/// Throws Error(target_missing) when neither overpass of t+1 exists.
Mask build_target(const PatchStore& store, const SampleKey& key, const std::string& product);
/// The same construction on day t (persistence input).
Mask build_current(const PatchStore& store, const SampleKey& key, const std::string& product);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

/// Per-channel mean and standard deviation over the native patch values
/// referenced by `keys` (fire masks binarized first).
NormStats compute_norm_stats(const PatchStore& store, std::span<const SampleKey> keys,
                             const ChannelManifest& manifest);

/// Resizes a size x size plane to kInputSize: bilinear below, area average
/// above, nearest for fire masks. NaN samples are skipped in the weights.
std::vector<float> resample_plane(std::span<const float> plane, int size, bool nearest);

/// Input stack 192x192xC; NaN after normalization becomes 0 and is flagged
/// in `nodata`. Throws Error(not_found) when no referenced patch exists.
FloatImage build_input(const PatchStore& store, const SampleKey& key,
                       const ChannelManifest& manifest, const NormStats& stats, Mask* nodata);

struct Sample {
  SampleKey key;
  FloatImage input;
  Mask nodata_mask;
  std::map<std::string, Mask> target;   // day t+1, per fire product
  std::map<std::string, Mask> current;  // day t, per fire product
};

struct DatasetConfig {
  std::string input_sensor{"VIIRS"};
  ChannelManifest manifest;
  FireProducts products;
  DateRange trainval;
  DateRange test;
  std::uint64_t split_seed = 0;
  double val_fraction = 0.25;
};

struct Dataset {
  DatasetConfig config;
  SplitAssignment split;
  NormStats stats;
  std::vector<Sample> train;
  std::vector<Sample> val;
  std::vector<Sample> test;
};

/// Selects, splits, normalizes and assembles every sample.
Dataset build_dataset(const PatchStore& store, const DatasetConfig& cfg);

void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace firecast
