#pragma once

#include <span>
#include <vector>

#include "det4d/geometry/chamfer.hpp"
#include "det4d/loss/params.hpp"

namespace det4d {

namespace loss_detail {

/// World-frame corner set of a camera-frame box under a (possibly
/// differentiated) camera-to-world pose. The quaternion is normalized before
/// building the rotation.
template <class S>
std::array<Vec3<S>, 8> world_corners(const BoxParamsT<S>& box_cam, const PoseParamsT<S>& pose) {
  const Mat3<S> r = pose.rotation.normalized().to_rotation();
  const auto corners = box_corners(box_cam.to_box());
  std::array<Vec3<S>, 8> out;
  for (std::size_t i = 0; i < 8; ++i) out[i] = r * corners[i] + pose.translation;
  return out;
}

}  // namespace loss_detail

/// Sum over frames of the Chamfer distance between the predicted box
/// transformed into world coordinates and the ground-truth world box.
template <class S>
S spatial_consistency_loss(std::span<const BoxParamsT<S>> boxes_cam,
                           std::span<const PoseParamsT<S>> poses_c2w,
                           const OrientedBox3D& gt_world) {
  if (boxes_cam.size() != poses_c2w.size())
    throw InstanceMismatch("spatial_consistency_loss: boxes and poses differ in length");
  if (boxes_cam.empty()) throw InstanceMismatch("spatial_consistency_loss: empty frame list");
  const auto gt_d = box_corners(gt_world);
  std::array<Vec3<S>, 8> gt;
  for (std::size_t i = 0; i < 8; ++i) gt[i] = Vec3<S>(gt_d[i]);
  S total(0);
  for (std::size_t i = 0; i < boxes_cam.size(); ++i)
    total += chamfer<S>(loss_detail::world_corners(boxes_cam[i], poses_c2w[i]), gt);
  return total;
}

/// Mean over frames of the Chamfer distance to the temporal average box,
/// formed corner-by-corner in canonical order.
template <class S>
S temporal_consistency_loss(std::span<const BoxParamsT<S>> boxes_cam,
                            std::span<const PoseParamsT<S>> poses_c2w) {
  if (boxes_cam.size() != poses_c2w.size())
    throw InstanceMismatch("temporal_consistency_loss: boxes and poses differ in length");
  if (boxes_cam.empty()) throw InstanceMismatch("temporal_consistency_loss: empty frame list");
  const std::size_t t = boxes_cam.size();
  std::vector<std::array<Vec3<S>, 8>> per_frame;
  per_frame.reserve(t);
  for (std::size_t i = 0; i < t; ++i)
    per_frame.push_back(loss_detail::world_corners(boxes_cam[i], poses_c2w[i]));

  std::array<Vec3<S>, 8> mean{};
  for (const auto& corners : per_frame)
    for (std::size_t c = 0; c < 8; ++c) mean[c] += corners[c];
  const S inv_t = S(1.0 / static_cast<double>(t));
  for (auto& m : mean) m = m * inv_t;

  S total(0);
  for (const auto& corners : per_frame) total += chamfer<S>(corners, mean);
  return total * inv_t;
}

namespace loss_detail {

// Parameter layout per frame: box (7) then pose (8).
inline constexpr std::size_t kFrameParamCount = BoxParams::kCount + PoseParams::kCount;

struct SeededFrames {
  std::vector<BoxParamsT<Dual>> boxes;
  std::vector<PoseParamsT<Dual>> poses;
  std::size_t total = 0;
};

inline SeededFrames seed_frames(std::span<const BoxParams> boxes,
                                std::span<const PoseParams> poses) {
  SeededFrames out;
  out.total = kFrameParamCount * boxes.size();
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const std::size_t base = kFrameParamCount * i;
    out.boxes.push_back(seed_box(boxes[i], base, out.total));
    out.poses.push_back(seed_pose(poses[i], base + BoxParams::kCount, out.total));
  }
  return out;
}

}  // namespace loss_detail

inline LossValue eval_spatial_consistency_loss(std::span<const BoxParams> boxes,
                                               std::span<const PoseParams> poses,
                                               const OrientedBox3D& gt_world) {
  if (boxes.size() != poses.size())
    throw InstanceMismatch("spatial_consistency_loss: boxes and poses differ in length");
  const auto seeded = loss_detail::seed_frames(boxes, poses);
  return loss_detail::finish(
      spatial_consistency_loss<Dual>(seeded.boxes, seeded.poses, gt_world), seeded.total);
}

inline LossValue eval_temporal_consistency_loss(std::span<const BoxParams> boxes,
                                                std::span<const PoseParams> poses) {
  if (boxes.size() != poses.size())
    throw InstanceMismatch("temporal_consistency_loss: boxes and poses differ in length");
  const auto seeded = loss_detail::seed_frames(boxes, poses);
  return loss_detail::finish(temporal_consistency_loss<Dual>(seeded.boxes, seeded.poses),
                             seeded.total);
}

}  // namespace det4d
