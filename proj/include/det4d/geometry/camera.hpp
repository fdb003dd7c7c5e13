#pragma once

#include <string>

#include "det4d/core/errors.hpp"
#include "det4d/core/vec.hpp"

namespace det4d {

/// Pinhole camera model. Pixel coordinates are continuous with integer
/// coordinates at pixel centers; (cx, cy) is the principal point.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("intrinsics: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw ConfigError("intrinsics: image size must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
      throw ConfigError("intrinsics: principal point outside image");
  }
};

struct Projection {
  Vec2d uv;
  double depth = 0.0;
};

inline Projection project(const Vec3d& p, const CameraIntrinsics& k) {
  if (!(p.z > 0.0)) throw NonPositiveDepth("project: point depth " + std::to_string(p.z));
  return {{k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy}, p.z};
}

inline Vec3d backproject(const Vec2d& pixel, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) throw NonPositiveDepth("backproject: depth " + std::to_string(depth));
  return {(pixel.x - k.cx) / k.fx * depth, (pixel.y - k.cy) / k.fy * depth, depth};
}

}  // namespace det4d
