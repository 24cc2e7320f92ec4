#include "firecast/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "firecast/binio.hpp"
#include "firecast/error.hpp"

namespace firecast {
namespace {

bool on(float v) { return !std::isnan(v) && v != 0.0f; }

void put(ByteImage& img, int r, int c, const std::array<std::uint8_t, 3>& rgb) {
  for (int k = 0; k < 3; ++k) img.at(k, r, c) = rgb[k];
}

}  // namespace

std::array<std::uint8_t, 3> viridis(double t) {
  static constexpr std::array<std::array<double, 3>, 5> kStops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(std::isnan(t) ? 0.0 : t, 0.0, 1.0) * (kStops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), kStops.size() - 2);
  const double f = t - static_cast<double>(i);
  std::array<std::uint8_t, 3> out{};
  for (int k = 0; k < 3; ++k)
    out[k] = static_cast<std::uint8_t>(std::lround(kStops[i][k] + f * (kStops[i + 1][k] - kStops[i][k])));
  return out;
}

ByteImage render_mask(const FloatImage& plane) {
  ByteImage img(1, plane.rows(), plane.cols(), 0);
  for (int r = 0; r < plane.rows(); ++r)
    for (int c = 0; c < plane.cols(); ++c)
      if (on(plane.at(r, c))) img.at(r, c) = 255;
  return img;
}

ByteImage render_progression(const FloatImage& days, double max_days) {
  ByteImage img(3, days.rows(), days.cols(), 0);
  for (int r = 0; r < days.rows(); ++r)
    for (int c = 0; c < days.cols(); ++c) {
      const float v = days.at(r, c);
      if (!std::isnan(v)) put(img, r, c, viridis(max_days > 0 ? v / max_days : 0.0));
    }
  return img;
}

ByteImage render_triptych(const FloatImage& pred, const FloatImage& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw Error(ErrorCode::shape_mismatch, "prediction and target shapes differ");
  ByteImage img(3, pred.rows(), pred.cols(), 0);
  for (int r = 0; r < pred.rows(); ++r)
    for (int c = 0; c < pred.cols(); ++c) {
      const bool p = on(pred.at(r, c));
      const bool t = on(target.at(r, c));
      if (p && t) put(img, r, c, kTruePositive);
      else if (p) put(img, r, c, kFalsePositive);
      else if (t) put(img, r, c, kFalseNegative);
    }
  return img;
}

void write_pnm(const std::filesystem::path& path, const ByteImage& img) {
  if (img.channels() != 1 && img.channels() != 3)
    throw Error(ErrorCode::invalid_argument, "PNM output needs 1 or 3 channels");
  const std::string header = (img.channels() == 1 ? "P5\n" : "P6\n") + std::to_string(img.cols()) +
                             " " + std::to_string(img.rows()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c)
      for (int k = 0; k < img.channels(); ++k) bytes.push_back(img.at(k, r, c));
  binio::write_file_atomic(path, bytes);
}

}  // namespace firecast
