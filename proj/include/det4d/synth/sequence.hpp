#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "det4d/core/errors.hpp"
#include "det4d/synth/render.hpp"
#include "det4d/synth/scene.hpp"
#include "det4d/synth/trajectory.hpp"

namespace det4d {

struct RawFrame {
  RigidTransform pose_c2w;
  CameraIntrinsics intrinsics;
  std::shared_ptr<const DepthMap> depth;
  std::shared_ptr<const Mask2D> mask;
};

/// A recorded sequence: the scene it was captured in plus one rendered
/// frame per trajectory pose.
struct RawSequence {
  SceneSpec scene;
  std::vector<RawFrame> frames;
};

inline RawSequence render_sequence(const SceneSpec& scene, const TrajectorySpec& traj,
                                   const CameraIntrinsics& k) {
  RawSequence seq;
  seq.scene = scene;
  seq.frames.reserve(traj.poses.size());
  for (const auto& pose : traj.poses) {
    auto rendered = render_frame(scene, pose, k);
    seq.frames.push_back({pose, k, std::make_shared<DepthMap>(std::move(rendered.depth)),
                          std::make_shared<Mask2D>(std::move(rendered.mask))});
  }
  return seq;
}

/// Instance ids visible (>= 1 mask pixel) anywhere in the sequence.
inline std::set<std::int32_t> visible_instances(const RawSequence& seq) {
  std::set<std::int32_t> seen;
  for (const auto& frame : seq.frames)
    for (const auto id : frame.mask->data())
      if (id != 0) seen.insert(id);
  return seen;
}

/// Renders a walk through the scene, retrying with derived seeds until every
/// foreground object shows up in at least one frame.
inline RawSequence record_sequence(const SceneSpec& scene, int n_frames,
                                   const CameraIntrinsics& k, std::uint64_t seed,
                                   const WalkConfig& walk = {}, bool guarantee_visibility = false,
                                   int trajectory_retries = 20) {
  Rng rng(seed);
  for (int attempt = 0; attempt < trajectory_retries; ++attempt) {
    const auto traj = random_walk(scene, n_frames, rng.fork(static_cast<std::uint64_t>(attempt))
                                                       .next_u64(),
                                  walk);
    auto seq = render_sequence(scene, traj, k);
    if (!guarantee_visibility) return seq;
    const auto seen = visible_instances(seq);
    bool all = true;
    for (const auto& obj : scene.objects) {
      if (scene.is_background(obj.category)) continue;
      if (!seen.contains(obj.instance_id)) {
        all = false;
        break;
      }
    }
    if (all) return seq;
  }
  throw PlacementFailure("record_sequence: no trajectory made every object visible");
}

/// Fixed-length windows starting at multiples of `stride`; trailing frames
/// that cannot fill a window are dropped.
inline std::vector<RawSequence> segment_clips(const RawSequence& raw, int clip_len, int stride) {
  if (clip_len < 1) throw ConfigError("segment_clips: clip_len must be >= 1");
  if (stride < 1 || stride > clip_len)
    throw ConfigError("segment_clips: stride must be in [1, clip_len]");
  std::vector<RawSequence> clips;
  const int n = static_cast<int>(raw.frames.size());
  for (int start = 0; start + clip_len <= n; start += stride) {
    RawSequence clip;
    clip.scene = raw.scene;
    clip.frames.assign(raw.frames.begin() + start, raw.frames.begin() + start + clip_len);
    clips.push_back(std::move(clip));
  }
  return clips;
}

}  // namespace det4d
