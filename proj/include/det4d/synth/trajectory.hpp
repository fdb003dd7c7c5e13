#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "det4d/core/errors.hpp"
#include "det4d/core/rng.hpp"
#include "det4d/geometry/transform.hpp"
#include "det4d/synth/scene.hpp"

namespace det4d {

struct TrajectorySpec {
  std::vector<RigidTransform> poses;  // camera-to-world, one per frame
  int frame_period = 1;
};

struct WalkConfig {
  double max_step = 0.25;          // meters per frame
  double max_turn_deg = 15.0;      // yaw change per frame
  double camera_height = 1.5;      // meters above the floor
  double wall_margin = 0.3;        // clearance kept from the room boundary
  double object_margin = 0.2;      // clearance kept from foreground boxes
  int resample_retries = 50;       // blocked-step resamples before standing still
};

/// Level camera at heading yaw: x right, y down, z forward, world up +z.
inline Mat3d camera_rotation_from_heading(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return Mat3d::from_cols({s, -c, 0}, {0, 0, -1}, {c, s, 0});
}

namespace detail {

inline bool position_free(const SceneSpec& scene, const WalkConfig& cfg, const Vec3d& p) {
  if (p.x < cfg.wall_margin || p.x > scene.room_extents.x - cfg.wall_margin) return false;
  if (p.y < cfg.wall_margin || p.y > scene.room_extents.y - cfg.wall_margin) return false;
  for (const auto& obj : scene.objects) {
    if (scene.is_background(obj.category)) continue;
    OrientedBox3D grown = obj.box;
    grown.dims += Vec3d{2 * cfg.object_margin, 2 * cfg.object_margin, 2 * cfg.object_margin};
    if (box_contains(grown, p, 0.0)) return false;
  }
  return true;
}

}  // namespace detail

/// Seeded random walk at fixed height. Blocked steps are resampled; when the
/// retry budget runs out the camera stands still for that frame, so every
/// requested frame is produced.
inline TrajectorySpec random_walk(const SceneSpec& scene, int n_steps, std::uint64_t seed,
                                  const WalkConfig& cfg = {}) {
  if (n_steps < 1) throw ConfigError("random_walk: n_steps must be >= 1");

  Rng rng(seed);
  Vec3d pos;
  bool found = false;
  for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
    pos = {rng.uniform(cfg.wall_margin, scene.room_extents.x - cfg.wall_margin),
           rng.uniform(cfg.wall_margin, scene.room_extents.y - cfg.wall_margin),
           cfg.camera_height};
    found = detail::position_free(scene, cfg, pos);
  }
  if (!found) throw PlacementFailure("random_walk: no free start position");

  double heading = rng.uniform(-M_PI, M_PI);
  const double max_turn = cfg.max_turn_deg * M_PI / 180.0;

  TrajectorySpec traj;
  traj.poses.push_back({camera_rotation_from_heading(heading), pos});
  for (int step = 1; step < n_steps; ++step) {
    Vec3d next = pos;
    double next_heading = heading;
    for (int attempt = 0; attempt < cfg.resample_retries; ++attempt) {
      const double turn = rng.uniform(-max_turn, max_turn);
      const double len = rng.uniform(0.0, cfg.max_step);
      const double h = heading + turn;
      const Vec3d candidate = pos + Vec3d{len * std::cos(h), len * std::sin(h), 0.0};
      if (detail::position_free(scene, cfg, candidate)) {
        next = candidate;
        next_heading = h;
        break;
      }
    }
    pos = next;
    heading = next_heading;
    traj.poses.push_back({camera_rotation_from_heading(heading), pos});
  }
  return traj;
}

}  // namespace det4d
