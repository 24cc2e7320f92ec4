#include "firecast/patch_store.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>

#include "firecast/binio.hpp"
#include "firecast/error.hpp"

namespace fs = std::filesystem;

namespace firecast {
namespace {

constexpr char kMagic[5] = "RST1";

std::optional<CellId> parse_cell_stem(const std::string& stem) {
  const auto us = stem.find('_');
  if (us == std::string::npos) return std::nullopt;
  CellId c;
  const char* b = stem.data();
  if (std::from_chars(b, b + us, c.x).ec != std::errc{}) return std::nullopt;
  auto [p, ec] = std::from_chars(b + us + 1, b + stem.size(), c.y);
  if (ec != std::errc{} || p != b + stem.size()) return std::nullopt;
  return c;
}

}  // namespace

int PatchRaster::channel_index(const std::string& band) const {
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i].name == band) return static_cast<int>(i);
  return -1;
}

void validate_patch(const PatchRaster& p) {
  if (p.channels.empty()) throw Error(ErrorCode::validation, "patch without channels");
  const ResolutionClass rc = p.channels.front().resolution;
  for (const auto& c : p.channels)
    if (c.resolution != rc)
      throw Error(ErrorCode::validation, "patch mixes resolution classes");
  if (p.size != patch_size_for(rc))
    throw Error(ErrorCode::validation, "patch size " + std::to_string(p.size) +
                                           " does not match " + to_string(rc));
  if (p.data.size() != p.channels.size() * static_cast<std::size_t>(p.size) * p.size)
    throw Error(ErrorCode::length_mismatch, "patch payload size");
  if (p.product.empty() || p.product.find('/') != std::string::npos)
    throw Error(ErrorCode::validation, "bad product identifier '" + p.product + "'");
}

bool bitwise_equal(const PatchRaster& a, const PatchRaster& b) {
  return a.key() == b.key() && a.size == b.size && a.channels == b.channels &&
         a.data.size() == b.data.size() &&
         (a.data.empty() ||
          std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0);
}

std::vector<std::uint8_t> encode_rst(const RstImage& img) {
  const std::size_t expect = img.channels.size() * static_cast<std::size_t>(img.size) * img.size;
  if (img.size <= 0 || img.size > 0xFFFF || img.channels.size() > 0xFFFF ||
      img.data.size() != expect)
    throw Error(ErrorCode::length_mismatch, "raster payload does not match its header");
  binio::Writer w;
  w.magic(kMagic);
  w.u16(static_cast<std::uint16_t>(img.size));
  w.u16(static_cast<std::uint16_t>(img.channels.size()));
  for (const auto& c : img.channels) {
    w.str(c.name);
    w.u8(static_cast<std::uint8_t>(c.resolution));
    w.u8(static_cast<std::uint8_t>(c.kind));
  }
  w.f32s(img.data);
  return std::move(w.buffer());
}

RstImage decode_rst(std::span<const std::uint8_t> bytes) {
  binio::Reader r(bytes);
  if (bytes.size() < 4 || !r.magic(kMagic)) throw Error(ErrorCode::bad_magic, "not a raster file");
  RstImage img;
  img.size = r.u16();
  const std::uint16_t n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) {
    BandSpec b;
    b.name = r.str();
    const std::uint8_t rc = r.u8();
    const std::uint8_t kind = r.u8();
    if (!is_valid_resolution(rc) || kind > 4)
      throw Error(ErrorCode::validation, "bad channel table entry");
    b.resolution = static_cast<ResolutionClass>(rc);
    b.kind = static_cast<BandKind>(kind);
    img.channels.push_back(std::move(b));
  }
  const std::size_t count = std::size_t{n} * img.size * img.size;
  if (r.remaining() != count * 4)
    throw Error(r.remaining() < count * 4 ? ErrorCode::truncated_file : ErrorCode::length_mismatch,
                "raster payload size");
  img.data.resize(count);
  r.f32s(img.data);
  return img;
}

void write_rst(const fs::path& path, const RstImage& img) {
  binio::write_file_atomic(path, encode_rst(img));
}

RstImage read_rst(const fs::path& path) { return decode_rst(binio::read_file(path)); }

fs::path patch_path(const fs::path& root, const PatchKey& key) {
  return root / key.product / key.date.iso() / std::string(1, daynight_letter(key.daynight)) /
         (cell_name(key.cell) + ".rst");
}

void write_patch(const fs::path& root, const PatchRaster& patch) {
  validate_patch(patch);
  write_rst(patch_path(root, patch.key()), RstImage{patch.size, patch.channels, patch.data});
}

PatchRaster read_patch(const fs::path& root, const std::string& product, Date date,
                       DayNight dn, CellId cell) {
  const PatchKey key{product, date, dn, cell};
  const fs::path path = patch_path(root, key);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw Error(ErrorCode::not_found, "no patch at " + path.string());
  PatchRaster p;
  try {
    RstImage img = read_rst(path);
    p.size = img.size;
    p.channels = std::move(img.channels);
    p.data = std::move(img.data);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::not_found) throw;
    throw Error(ErrorCode::corrupt_entry, path.string() + ": " + e.what());
  }
  p.product = product;
  p.date = date;
  p.daynight = dn;
  p.cell = cell;
  return p;
}

std::optional<PatchRaster> PatchStore::try_read(const PatchKey& key) const {
  if (!contains(key)) return std::nullopt;
  return read(key);
}

void DirectoryStore::write(const PatchRaster& patch) { write_patch(root_, patch); }

PatchRaster DirectoryStore::read(const PatchKey& key) const {
  return read_patch(root_, key.product, key.date, key.daynight, key.cell);
}

bool DirectoryStore::contains(const PatchKey& key) const {
  std::error_code ec;
  return fs::is_regular_file(patch_path(root_, key), ec);
}

std::vector<PatchKey> DirectoryStore::keys() const {
  std::vector<PatchKey> out;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return out;
  for (const auto& prod : fs::directory_iterator(root_)) {
    if (!prod.is_directory()) continue;
    for (const auto& day : fs::directory_iterator(prod.path())) {
      if (!day.is_directory()) continue;
      Date date;
      try {
        date = Date::parse(day.path().filename().string());
      } catch (const Error&) {
        continue;
      }
      for (const auto& dn : fs::directory_iterator(day.path())) {
        const std::string letter = dn.path().filename().string();
        if (!dn.is_directory() || (letter != "D" && letter != "N")) continue;
        for (const auto& f : fs::directory_iterator(dn.path())) {
          if (f.path().extension() != ".rst") continue;
          auto cell = parse_cell_stem(f.path().stem().string());
          if (!cell) continue;
          out.push_back({prod.path().filename().string(), date,
                         letter == "D" ? DayNight::DAY : DayNight::NIGHT, *cell});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void MemoryStore::write(const PatchRaster& patch) {
  validate_patch(patch);
  std::lock_guard lock(mu_);
  patches_[patch.key()] = patch;
}

PatchRaster MemoryStore::read(const PatchKey& key) const {
  std::lock_guard lock(mu_);
  auto it = patches_.find(key);
  if (it == patches_.end())
    throw Error(ErrorCode::not_found, "no patch " + key.product + "/" + key.date.iso() + "/" +
                                          cell_name(key.cell));
  return it->second;
}

bool MemoryStore::contains(const PatchKey& key) const {
  std::lock_guard lock(mu_);
  return patches_.count(key) > 0;
}

std::vector<PatchKey> MemoryStore::keys() const {
  std::lock_guard lock(mu_);
  std::vector<PatchKey> out;
  out.reserve(patches_.size());
  for (const auto& [k, _] : patches_) out.push_back(k);
  return out;
}

}  // namespace firecast
