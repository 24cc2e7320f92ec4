#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace firecast {

/// Dense channel-major, row-major raster: index = (c * rows + r) * cols + x.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int channels, int rows, int cols, T fill = T{})
      : channels_(channels), rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(channels) * rows * cols, fill) {}

  int channels() const { return channels_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(rows_) * cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int c, int r, int x) { return data_[index(c, r, x)]; }
  const T& at(int c, int r, int x) const { return data_[index(c, r, x)]; }
  T& at(int r, int x) { return data_[index(0, r, x)]; }
  const T& at(int r, int x) const { return data_[index(0, r, x)]; }

  std::span<T> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const T> plane(int c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Image& o) const {
    return channels_ == o.channels_ && rows_ == o.rows_ && cols_ == o.cols_;
  }
  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int c, int r, int x) const {
    assert(c >= 0 && c < channels_ && r >= 0 && r < rows_ && x >= 0 && x < cols_);
    return (static_cast<std::size_t>(c) * rows_ + r) * cols_ + x;
  }

  int channels_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using FloatImage = Image<float>;
/// Single-channel binary raster with values {0, 1}.
using Mask = Image<std::uint8_t>;

}  // namespace firecast
