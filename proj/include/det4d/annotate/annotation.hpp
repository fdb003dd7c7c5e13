#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "det4d/geometry/box.hpp"
#include "det4d/geometry/camera.hpp"
#include "det4d/geometry/iou.hpp"
#include "det4d/geometry/raster.hpp"
#include "det4d/geometry/transform.hpp"

namespace det4d {

struct ObjectAnnotation {
  std::int32_t instance_id = 0;
  std::string category;
  OrientedBox3D box_camera;  // this frame's camera coordinates
  OrientedBox3D box_ref;     // clip reference frame (frame-0 camera)
  Rect2D prompt{};           // pixels, clamped to the image
  double score = 1.0;        // ground truth annotations carry 1.0
};

struct FrameRecord {
  RigidTransform pose_ref;  // maps this frame's camera coordinates to the reference frame
  CameraIntrinsics intrinsics;
  std::shared_ptr<const DepthMap> depth;
  std::shared_ptr<const Mask2D> mask;
  std::vector<ObjectAnnotation> annotations;
};

/// An annotated fixed-length clip. Frame 0 is the reference: its pose is the
/// identity and all box_ref fields live in its camera coordinates.
struct SequenceClip {
  std::string id;
  std::vector<FrameRecord> frames;
};

/// Relative poses anchored at the first: out[i] = poses[0]^-1 ∘ poses[i].
inline std::vector<RigidTransform> rereference(const std::vector<RigidTransform>& poses) {
  if (poses.empty()) throw ConfigError("rereference: need at least one pose");
  const RigidTransform anchor_inv = poses.front().inverse();
  std::vector<RigidTransform> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back(anchor_inv.compose(p));
  return out;
}

/// Re-anchors a clip to its own first frame: poses and reference-frame boxes
/// are re-expressed so frame 0 becomes the identity.
inline SequenceClip rereference(const SequenceClip& clip) {
  if (clip.frames.empty()) throw ConfigError("rereference: empty clip");
  SequenceClip out = clip;
  const RigidTransform anchor_inv = clip.frames.front().pose_ref.inverse();
  for (auto& frame : out.frames) {
    frame.pose_ref = anchor_inv.compose(frame.pose_ref);
    for (auto& ann : frame.annotations) ann.box_ref = transform_box(anchor_inv, ann.box_ref);
  }
  return out;
}

}  // namespace det4d
