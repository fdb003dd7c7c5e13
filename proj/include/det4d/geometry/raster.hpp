#pragma once

#include <cstdint>
#include <vector>

#include "det4d/core/errors.hpp"

namespace det4d {

/// Row-major per-pixel grid; (x, y) indexes column x of row y.
template <class T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width),
        height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width <= 0 || height <= 0) throw ConfigError("raster: size must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

  T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  bool operator==(const Raster& o) const {
    return width_ == o.width_ && height_ == o.height_ && data_ == o.data_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Depth along the camera z axis in meters; kNoDepth marks pixels no surface
/// was hit at.
using DepthMap = Raster<float>;

/// Per-pixel instance id; 0 is background.
using Mask2D = Raster<std::int32_t>;

inline constexpr float kNoDepth = 0.0f;

}  // namespace det4d
