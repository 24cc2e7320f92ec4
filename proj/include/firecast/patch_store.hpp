#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "firecast/bands.hpp"
#include "firecast/date.hpp"
#include "firecast/grid.hpp"

namespace firecast {

struct PatchKey {
  std::string product;
  Date date;
  DayNight daynight = DayNight::DAY;
  CellId cell;

  auto operator<=>(const PatchKey&) const = default;
};

/// Fixed-size per-cell raster for one product, date and overpass.
/// data is channel-major, then row-major; NaN marks nodata.
struct PatchRaster {
  std::string product;
  CellId cell;
  Date date;
  DayNight daynight = DayNight::DAY;
  int size = 0;
  std::vector<BandSpec> channels;
  std::vector<float> data;

  PatchKey key() const { return {product, date, daynight, cell}; }
  float at(int channel, int row, int col) const {
    return data[(static_cast<std::size_t>(channel) * size + row) * size + col];
  }
  float& at(int channel, int row, int col) {
    return data[(static_cast<std::size_t>(channel) * size + row) * size + col];
  }
  int channel_index(const std::string& band) const;
};

/// Throws Error(validation) when channels mix resolution classes or the size
/// does not match the class's patch size.
void validate_patch(const PatchRaster& p);
bool bitwise_equal(const PatchRaster& a, const PatchRaster& b);

/// Raw .rst payload: size, channel table and f32 data (no key metadata).
struct RstImage {
  int size = 0;
  std::vector<BandSpec> channels;
  std::vector<float> data;
};
std::vector<std::uint8_t> encode_rst(const RstImage& img);
RstImage decode_rst(std::span<const std::uint8_t> bytes);
void write_rst(const std::filesystem::path& path, const RstImage& img);
RstImage read_rst(const std::filesystem::path& path);

/// store_root/<product>/<YYYY-MM-DD>/<D|N>/<x>_<y>.rst
std::filesystem::path patch_path(const std::filesystem::path& root, const PatchKey& key);

void write_patch(const std::filesystem::path& root, const PatchRaster& patch);
PatchRaster read_patch(const std::filesystem::path& root, const std::string& product,
                       Date date, DayNight dn, CellId cell);

/// Keyed patch storage shared by the pipeline stages.
class PatchStore {
 public:
  virtual ~PatchStore() = default;
  virtual void write(const PatchRaster& patch) = 0;
  /// Throws Error(not_found) or Error(corrupt_entry).
  virtual PatchRaster read(const PatchKey& key) const = 0;
  virtual bool contains(const PatchKey& key) const = 0;
  /// All keys, sorted.
  virtual std::vector<PatchKey> keys() const = 0;

  std::optional<PatchRaster> try_read(const PatchKey& key) const;
};

class DirectoryStore final : public PatchStore {
 public:
  explicit DirectoryStore(std::filesystem::path root) : root_(std::move(root)) {}

  void write(const PatchRaster& patch) override;
  PatchRaster read(const PatchKey& key) const override;
  bool contains(const PatchKey& key) const override;
  std::vector<PatchKey> keys() const override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

class MemoryStore final : public PatchStore {
 public:
  void write(const PatchRaster& patch) override;
  PatchRaster read(const PatchKey& key) const override;
  bool contains(const PatchKey& key) const override;
  std::vector<PatchKey> keys() const override;

 private:
  mutable std::mutex mu_;
  std::map<PatchKey, PatchRaster> patches_;
};

}  // namespace firecast
