#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "firecast/image.hpp"

namespace firecast {

/// 8-bit raster: one channel (gray) or three (RGB).
using ByteImage = Image<std::uint8_t>;

inline constexpr std::array<std::uint8_t, 3> kTruePositive{0, 255, 0};
inline constexpr std::array<std::uint8_t, 3> kFalsePositive{255, 0, 0};
inline constexpr std::array<std::uint8_t, 3> kFalseNegative{0, 0, 255};

/// Nonzero, non-NaN pixels white, the rest black.
ByteImage render_mask(const FloatImage& plane);

/// Viridis ramp over [0, max_days]; NaN pixels black.
ByteImage render_progression(const FloatImage& days, double max_days);

/// Overlay of a binary prediction on a binary target: green TP, red FP,
/// blue FN, black TN. Throws Error(shape_mismatch).
ByteImage render_triptych(const FloatImage& pred, const FloatImage& target);

std::array<std::uint8_t, 3> viridis(double t);

/// Binary PGM (1 channel) or PPM (3 channels).
void write_pnm(const std::filesystem::path& path, const ByteImage& img);

}  // namespace firecast
