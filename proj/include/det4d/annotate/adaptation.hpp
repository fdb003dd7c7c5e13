#pragma once

#include <map>
#include <string>
#include <vector>

#include "det4d/annotate/annotation.hpp"
#include "det4d/annotate/filters.hpp"
#include "det4d/synth/render.hpp"
#include "det4d/synth/sequence.hpp"

namespace det4d {

enum class VisibilityPhase { FullFromStart, Accumulating, Converged, Dropped };

inline const char* to_string(VisibilityPhase p) {
  switch (p) {
    case VisibilityPhase::FullFromStart: return "FullFromStart";
    case VisibilityPhase::Accumulating: return "Accumulating";
    case VisibilityPhase::Converged: return "Converged";
    case VisibilityPhase::Dropped: return "Dropped";
  }
  return "?";
}

/// Per-object adaptation bookkeeping across a clip. The accumulated cloud and
/// boxes live in the clip reference frame so extents can only grow.
struct AdaptationState {
  std::int32_t instance_id = 0;
  VisibilityPhase phase = VisibilityPhase::Accumulating;
  PointCloud3D cloud;         // reference frame
  OrientedBox3D adapted_ref;  // valid once has_adapted
  OrientedBox3D global_ref;
  bool has_adapted = false;
};

struct AdaptationParams {
  FilterParams filters;
  double full_visibility_ratio = 0.95;  // visible / rendered-alone pixels
  double converge_volume_ratio = 0.9;   // tight-fit volume / global volume
  int backprojection_stride = 2;        // masked-pixel subsampling grid
};

struct ClipAnnotationResult {
  SequenceClip clip;
  std::map<std::int32_t, AdaptationState> states;
  std::vector<std::string> warnings;
};

namespace detail {

inline void accumulate_masked_pixels(AdaptationState& state, std::int32_t id,
                                     const RawFrame& frame, const RigidTransform& ref_from_cam,
                                     int stride) {
  const auto& mask = *frame.mask;
  const auto& depth = *frame.depth;
  for (int y = 0; y < mask.height(); y += stride)
    for (int x = 0; x < mask.width(); x += stride) {
      if (mask.at(x, y) != id) continue;
      const float d = depth.at(x, y);
      if (d == kNoDepth) continue;
      const Vec3d p_cam = backproject({static_cast<double>(x), static_cast<double>(y)},
                                      static_cast<double>(d), frame.intrinsics);
      state.cloud.push_back(ref_from_cam.apply(p_cam));
    }
}

}  // namespace detail

/// Turns a raw clip into spatiotemporally consistent annotations.
///
/// Objects fully visible when they first pass the filters keep their global
/// box until they disappear from view, which drops them for the rest of the
/// clip. Partially visible objects start from the tight box of their
/// back-projected visible pixels and grow it monotonically as the masked
/// point cloud accumulates; once the tight fit reaches the convergence
/// fraction of the global volume they emit the global box from then on.
inline ClipAnnotationResult adapt_boxes(const RawSequence& raw, const AdaptationParams& params) {
  if (raw.frames.empty()) throw ConfigError("adapt_boxes: empty clip");

  ClipAnnotationResult result;
  const RigidTransform anchor_inv = raw.frames.front().pose_c2w.inverse();

  for (std::size_t i = 0; i < raw.frames.size(); ++i) {
    const RawFrame& in = raw.frames[i];
    const RigidTransform ref_from_cam = anchor_inv.compose(in.pose_c2w);
    const RigidTransform cam_from_world = in.pose_c2w.inverse();
    const RigidTransform cam_from_ref = ref_from_cam.inverse();
    const CameraIntrinsics& k = in.intrinsics;

    FrameRecord frame;
    frame.pose_ref = ref_from_cam;
    frame.intrinsics = k;
    frame.depth = in.depth;
    frame.mask = in.mask;

    for (const auto& obj : raw.scene.objects) {
      if (raw.scene.is_background(obj.category)) continue;
      const std::int32_t id = obj.instance_id;
      const OrientedBox3D box_cam = transform_box(cam_from_world, obj.box);

      const int vis_px = visible_pixel_count(id, box_cam, *in.mask, k);
      const bool passes = !outside_frustum_depth(box_cam, params.filters.depth_max) &&
                          vis_px >= params.filters.min_pixels &&
                          passes_vertex_depth(box_cam, *in.depth, k, params.filters.behind_margin);

      auto it = result.states.find(id);
      if (it == result.states.end()) {
        if (!passes) continue;  // not registered until it first survives the filters
        AdaptationState state;
        state.instance_id = id;
        state.global_ref = transform_box(anchor_inv, obj.box);

        const auto proj = project_box(box_cam, k);
        const int alone = count_pixels_alone(box_cam, k);
        const double ratio = alone > 0 ? static_cast<double>(vis_px) / alone : 0.0;
        const bool fully_visible =
            proj.all_in_image &&
            occluded_vertex_count(box_cam, id, *in.depth, *in.mask, k,
                                  params.filters.behind_margin) == 0 &&
            ratio >= params.full_visibility_ratio;
        state.phase =
            fully_visible ? VisibilityPhase::FullFromStart : VisibilityPhase::Accumulating;
        it = result.states.emplace(id, std::move(state)).first;
      }

      AdaptationState& state = it->second;
      const OrientedBox3D* emit_ref = nullptr;

      switch (state.phase) {
        case VisibilityPhase::Dropped:
          if (vis_px > 0)
            result.warnings.push_back("instance " + std::to_string(id) + " reappeared in frame " +
                                      std::to_string(i) + " after being dropped; ignored");
          break;
        case VisibilityPhase::FullFromStart:
        case VisibilityPhase::Converged:
          if (vis_px == 0) {
            state.phase = VisibilityPhase::Dropped;
          } else if (passes) {
            emit_ref = &state.global_ref;
          }
          break;
        case VisibilityPhase::Accumulating:
          if (passes) {
            detail::accumulate_masked_pixels(state, id, in, ref_from_cam,
                                             params.backprojection_stride);
            if (!state.cloud.empty()) {
              state.adapted_ref = tight_fitting_box(state.cloud, state.global_ref.rotation);
              state.has_adapted = true;
              if (state.adapted_ref.volume() >=
                  params.converge_volume_ratio * state.global_ref.volume()) {
                state.phase = VisibilityPhase::Converged;
                emit_ref = &state.global_ref;
              } else {
                emit_ref = &state.adapted_ref;
              }
            }
          }
          break;
      }

      if (emit_ref != nullptr) {
        ObjectAnnotation ann;
        ann.instance_id = id;
        ann.category = obj.category;
        ann.box_ref = *emit_ref;
        ann.box_camera = transform_box(cam_from_ref, ann.box_ref);
        ann.prompt = clamp_rect_to_image(project_box(ann.box_camera, k).rect, k);
        ann.score = 1.0;
        frame.annotations.push_back(std::move(ann));
      }
    }
    result.clip.frames.push_back(std::move(frame));
  }
  return result;
}

}  // namespace det4d
