#pragma once

#include <algorithm>
#include <cmath>

#include "det4d/geometry/box.hpp"
#include "det4d/geometry/camera.hpp"
#include "det4d/geometry/iou.hpp"

namespace det4d {

/// Image-plane footprint of a camera-frame box's corners.
struct BoxProjection {
  Rect2D rect{};             // bounding rect over corners with positive depth
  int corners_in_front = 0;  // corners with z > 0
  bool all_in_image = false; // every corner in front and inside the image
};

inline BoxProjection project_box(const OrientedBox3D& box_cam, const CameraIntrinsics& k) {
  BoxProjection out;
  out.rect = {1e300, 1e300, -1e300, -1e300};
  out.all_in_image = true;
  for (const Vec3d& c : box_corners(box_cam)) {
    if (!(c.z > 0.0)) {
      out.all_in_image = false;
      continue;
    }
    ++out.corners_in_front;
    const auto pr = project(c, k);
    out.rect.x0 = std::min(out.rect.x0, pr.uv.x);
    out.rect.y0 = std::min(out.rect.y0, pr.uv.y);
    out.rect.x1 = std::max(out.rect.x1, pr.uv.x);
    out.rect.y1 = std::max(out.rect.y1, pr.uv.y);
    if (pr.uv.x < 0.0 || pr.uv.x > k.width - 1 || pr.uv.y < 0.0 || pr.uv.y > k.height - 1)
      out.all_in_image = false;
  }
  if (out.corners_in_front == 0) out.all_in_image = false;
  return out;
}

inline Rect2D clamp_rect_to_image(const Rect2D& r, const CameraIntrinsics& k) {
  Rect2D c;
  c.x0 = std::clamp(r.x0, 0.0, static_cast<double>(k.width - 1));
  c.y0 = std::clamp(r.y0, 0.0, static_cast<double>(k.height - 1));
  c.x1 = std::clamp(r.x1, 0.0, static_cast<double>(k.width - 1));
  c.y1 = std::clamp(r.y1, 0.0, static_cast<double>(k.height - 1));
  return c;
}

}  // namespace det4d
