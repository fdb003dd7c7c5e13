#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "det4d/geometry/box.hpp"
#include "det4d/geometry/camera.hpp"
#include "det4d/geometry/project_box.hpp"
#include "det4d/geometry/raster.hpp"
#include "det4d/geometry/transform.hpp"
#include "det4d/synth/scene.hpp"

namespace det4d {

struct FilterParams {
  double depth_max = 10.0;      // meters; objects with centers beyond this are dropped
  int min_pixels = 100;         // visible-pixel floor against strong occlusion
  double behind_margin = 0.02;  // meters of slack before a vertex counts as occluded
};

/// Removes objects whose category is on the background list.
inline std::vector<SceneObject> filter_semantic(const std::vector<SceneObject>& objects,
                                                const std::vector<std::string>& background) {
  std::vector<SceneObject> kept;
  for (const auto& obj : objects)
    if (std::find(background.begin(), background.end(), obj.category) == background.end())
      kept.push_back(obj);
  return kept;
}

/// Drop rule for objects behind the camera or beyond the depth ceiling: gone
/// when every corner has non-positive camera depth, or the center is farther
/// than depth_max.
inline bool outside_frustum_depth(const OrientedBox3D& box_cam, double depth_max) {
  if (box_cam.center.z > depth_max) return true;
  for (const auto& c : box_corners(box_cam))
    if (c.z > 0.0) return false;
  return true;
}

inline std::vector<SceneObject> filter_frustum_depth(const std::vector<SceneObject>& objects,
                                                     const RigidTransform& pose_c2w,
                                                     double depth_max) {
  const RigidTransform w2c = pose_c2w.inverse();
  std::vector<SceneObject> kept;
  for (const auto& obj : objects)
    if (!outside_frustum_depth(transform_box(w2c, obj.box), depth_max)) kept.push_back(obj);
  return kept;
}

/// Mask pixels matching the instance id inside the projected corner rect.
inline int visible_pixel_count(std::int32_t instance_id, const OrientedBox3D& box_cam,
                               const Mask2D& mask, const CameraIntrinsics& k) {
  const auto proj = project_box(box_cam, k);
  if (proj.corners_in_front == 0) return 0;
  // With corners behind the camera the corner rect no longer bounds the
  // projection; fall back to the full image.
  Rect2D r{0, 0, static_cast<double>(k.width - 1), static_cast<double>(k.height - 1)};
  if (proj.corners_in_front == 8) r = clamp_rect_to_image(proj.rect, k);
  const int x0 = static_cast<int>(std::floor(r.x0));
  const int y0 = static_cast<int>(std::floor(r.y0));
  const int x1 = static_cast<int>(std::ceil(r.x1));
  const int y1 = static_cast<int>(std::ceil(r.y1));
  int count = 0;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (mask.in_bounds(x, y) && mask.at(x, y) == instance_id) ++count;
  return count;
}

/// Keep/drop by visible-pixel count: kept iff at least min_pixels remain.
inline bool passes_occlusion_pixels(std::int32_t instance_id, const OrientedBox3D& box_cam,
                                    const Mask2D& mask, const CameraIntrinsics& k,
                                    int min_pixels) {
  return visible_pixel_count(instance_id, box_cam, mask, k) >= min_pixels;
}

/// Number of box vertices occluded by nearer geometry: the vertex projects
/// in-image and its depth exceeds the rendered depth at that pixel by more
/// than the margin. Vertices projecting outside the image (or behind the
/// camera) never count.
inline int behind_vertex_count(const OrientedBox3D& box_cam, const DepthMap& depth,
                               const CameraIntrinsics& k, double margin) {
  int behind = 0;
  for (const auto& c : box_corners(box_cam)) {
    if (!(c.z > 0.0)) continue;
    const auto pr = project(c, k);
    const int px = static_cast<int>(std::lround(pr.uv.x));
    const int py = static_cast<int>(std::lround(pr.uv.y));
    if (!depth.in_bounds(px, py)) continue;
    const float d = depth.at(px, py);
    if (d != kNoDepth && c.z > static_cast<double>(d) + margin) ++behind;
  }
  return behind;
}

/// Keep/drop by vertex occlusion: dropped when more than five vertices lie
/// behind their pixels, i.e. kept at exactly five.
inline bool passes_vertex_depth(const OrientedBox3D& box_cam, const DepthMap& depth,
                                const CameraIntrinsics& k, double margin) {
  return behind_vertex_count(box_cam, depth, k, margin) < 6;
}

/// Like behind_vertex_count, but pixels covered by the object itself are
/// exempt. A solid cuboid always hides its far corners behind its own front
/// faces, so the plain count cannot distinguish self-occlusion from real
/// occluders; this variant only counts foreign geometry.
inline int occluded_vertex_count(const OrientedBox3D& box_cam, std::int32_t instance_id,
                                 const DepthMap& depth, const Mask2D& mask,
                                 const CameraIntrinsics& k, double margin) {
  int behind = 0;
  for (const auto& c : box_corners(box_cam)) {
    if (!(c.z > 0.0)) continue;
    const auto pr = project(c, k);
    const int px = static_cast<int>(std::lround(pr.uv.x));
    const int py = static_cast<int>(std::lround(pr.uv.y));
    if (!depth.in_bounds(px, py)) continue;
    if (mask.at(px, py) == instance_id) continue;
    const float d = depth.at(px, py);
    if (d != kNoDepth && c.z > static_cast<double>(d) + margin) ++behind;
  }
  return behind;
}

/// All four filters in the documented order: semantic, frustum/depth,
/// occlusion pixels, vertex depth.
inline bool passes_all_filters(const SceneObject& obj, const SceneSpec& scene,
                               const OrientedBox3D& box_cam, const DepthMap& depth,
                               const Mask2D& mask, const CameraIntrinsics& k,
                               const FilterParams& p) {
  if (scene.is_background(obj.category)) return false;
  if (outside_frustum_depth(box_cam, p.depth_max)) return false;
  if (!passes_occlusion_pixels(obj.instance_id, box_cam, mask, k, p.min_pixels)) return false;
  return passes_vertex_depth(box_cam, depth, k, p.behind_margin);
}

}  // namespace det4d
