#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include "det4d/geometry/box.hpp"
#include "det4d/geometry/camera.hpp"
#include "det4d/geometry/project_box.hpp"
#include "det4d/geometry/raster.hpp"
#include "det4d/geometry/transform.hpp"
#include "det4d/synth/scene.hpp"

namespace det4d {

namespace detail {

/// Slab-method ray/box intersection. The ray is o + t*d with unnormalized d;
/// returns the entry parameter, or a negative value on miss. Rays starting
/// inside the box do not count as hits.
inline double ray_box_entry(const Vec3d& o, const Vec3d& d, const OrientedBox3D& box) {
  const Mat3d rt = box.rotation.transposed();
  const Vec3d ol = rt * (o - box.center);
  const Vec3d dl = rt * d;
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::max();
  for (int axis = 0; axis < 3; ++axis) {
    const double half = box.dims[axis] / 2.0;
    if (std::abs(dl[axis]) < 1e-12) {
      if (std::abs(ol[axis]) > half) return -1.0;
      continue;
    }
    double t0 = (-half - ol[axis]) / dl[axis];
    double t1 = (half - ol[axis]) / dl[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return -1.0;
  }
  return t_near > 1e-9 ? t_near : -1.0;
}

}  // namespace detail

struct RenderedFrame {
  DepthMap depth;
  Mask2D mask;
};

/// Ray-casts the scene through every pixel center. Depth is the distance
/// along the camera z axis to the nearest box surface; the mask holds the
/// nearest instance id (0 where nothing is hit).
inline RenderedFrame render_frame(const SceneSpec& scene, const RigidTransform& pose_c2w,
                                  const CameraIntrinsics& k) {
  RenderedFrame out{DepthMap(k.width, k.height, kNoDepth), Mask2D(k.width, k.height, 0)};
  const Vec3d origin = pose_c2w.translation;
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      // d has unit z in camera coordinates, so the ray parameter equals the
      // depth along the optical axis.
      const Vec3d d_cam{(x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0};
      const Vec3d d_world = pose_c2w.rotation * d_cam;
      double best = std::numeric_limits<double>::max();
      std::int32_t best_id = 0;
      for (const auto& obj : scene.objects) {
        const double t = detail::ray_box_entry(origin, d_world, obj.box);
        if (t > 0.0 && t < best) {
          best = t;
          best_id = obj.instance_id;
        }
      }
      if (best_id != 0) {
        out.depth.at(x, y) = static_cast<float>(best);
        out.mask.at(x, y) = best_id;
      }
    }
  }
  return out;
}

/// Pixel count the box would cover rendered on its own (no occluders), used
/// as the denominator of visibility ratios. The box is given in camera
/// coordinates.
inline int count_pixels_alone(const OrientedBox3D& box_cam, const CameraIntrinsics& k) {
  const auto proj = project_box(box_cam, k);
  int x0 = 0, y0 = 0, x1 = k.width - 1, y1 = k.height - 1;
  if (proj.corners_in_front == 0) return 0;
  if (proj.corners_in_front == 8) {
    const auto r = clamp_rect_to_image(proj.rect, k);
    x0 = static_cast<int>(std::floor(r.x0));
    y0 = static_cast<int>(std::floor(r.y0));
    x1 = static_cast<int>(std::ceil(r.x1));
    y1 = static_cast<int>(std::ceil(r.y1));
  }
  int count = 0;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const Vec3d d_cam{(x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0};
      if (detail::ray_box_entry({0, 0, 0}, d_cam, box_cam) > 0.0) ++count;
    }
  return count;
}

}  // namespace det4d
