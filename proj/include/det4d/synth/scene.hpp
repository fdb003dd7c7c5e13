#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "det4d/core/errors.hpp"
#include "det4d/core/rng.hpp"
#include "det4d/geometry/box.hpp"
#include "det4d/geometry/iou.hpp"

namespace det4d {

struct SceneObject {
  std::int32_t instance_id = 0;  // unique, > 0
  std::string category;
  OrientedBox3D box;  // world frame ("global" box)
};

/// A cuboid room with the floor at z = 0 and interior extents [0, e] per
/// axis. Background slabs (floor, ceiling, walls) hug the interior from
/// outside so every interior ray terminates on geometry.
struct SceneSpec {
  Vec3d room_extents{};
  std::vector<SceneObject> objects;
  std::vector<std::string> background_categories;

  bool is_background(const std::string& category) const {
    return std::find(background_categories.begin(), background_categories.end(), category) !=
           background_categories.end();
  }

  const SceneObject* find(std::int32_t instance_id) const {
    for (const auto& o : objects)
      if (o.instance_id == instance_id) return &o;
    return nullptr;
  }
};

struct SceneConfig {
  Vec3d room_extents{8.0, 8.0, 3.0};
  int n_objects = 5;
  Vec3d dim_min{0.4, 0.4, 0.4};
  Vec3d dim_max{1.6, 1.6, 1.6};
  double wall_thickness = 0.1;
  int placement_retries = 200;  // rejection budget per object
  std::vector<std::string> foreground_categories{"chair",  "table", "sofa",   "cabinet",
                                                 "lamp",   "shelf", "box",    "plant",
                                                 "monitor", "bed"};
  std::vector<std::string> background_categories{"wall", "floor", "ceiling", "void"};
};

namespace detail {

inline void add_background(SceneSpec& scene, const SceneConfig& cfg, std::int32_t& next_id) {
  const Vec3d e = cfg.room_extents;
  const double t = cfg.wall_thickness;
  const auto add = [&](const std::string& category, const Vec3d& center, const Vec3d& dims) {
    scene.objects.push_back({next_id++, category, {center, dims, Mat3d::identity()}});
  };
  add("floor", {e.x / 2, e.y / 2, -t / 2}, {e.x + 2 * t, e.y + 2 * t, t});
  add("ceiling", {e.x / 2, e.y / 2, e.z + t / 2}, {e.x + 2 * t, e.y + 2 * t, t});
  add("wall", {-t / 2, e.y / 2, e.z / 2}, {t, e.y + 2 * t, e.z});
  add("wall", {e.x + t / 2, e.y / 2, e.z / 2}, {t, e.y + 2 * t, e.z});
  add("wall", {e.x / 2, -t / 2, e.z / 2}, {e.x + 2 * t, t, e.z});
  add("wall", {e.x / 2, e.y + t / 2, e.z / 2}, {e.x + 2 * t, t, e.z});
}

}  // namespace detail

/// Deterministic scene synthesis: `n_objects` gravity-aligned, pairwise
/// disjoint cuboids resting on the floor, plus the room shell.
inline SceneSpec generate_scene(const SceneConfig& cfg, std::uint64_t seed) {
  if (cfg.n_objects < 0) throw ConfigError("generate_scene: n_objects must be >= 0");
  if (!(cfg.room_extents.x > 0 && cfg.room_extents.y > 0 && cfg.room_extents.z > 0))
    throw ConfigError("generate_scene: room extents must be positive");

  SceneSpec scene;
  scene.room_extents = cfg.room_extents;
  scene.background_categories = cfg.background_categories;

  Rng rng(seed);
  std::int32_t next_id = 1;
  std::vector<OrientedBox3D> placed;
  for (int i = 0; i < cfg.n_objects; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < cfg.placement_retries && !ok; ++attempt) {
      OrientedBox3D box;
      box.dims = {rng.uniform(cfg.dim_min.x, cfg.dim_max.x),
                  rng.uniform(cfg.dim_min.y, cfg.dim_max.y),
                  rng.uniform(cfg.dim_min.z, cfg.dim_max.z)};
      const double yaw = rng.uniform(-M_PI, M_PI);
      box.rotation = yaw_rotation(yaw);
      // Horizontal footprint half-extents after the yaw.
      const double hx =
          (std::abs(std::cos(yaw)) * box.dims.x + std::abs(std::sin(yaw)) * box.dims.y) / 2;
      const double hy =
          (std::abs(std::sin(yaw)) * box.dims.x + std::abs(std::cos(yaw)) * box.dims.y) / 2;
      if (2 * hx >= cfg.room_extents.x || 2 * hy >= cfg.room_extents.y ||
          box.dims.z >= cfg.room_extents.z)
        continue;
      box.center = {rng.uniform(hx, cfg.room_extents.x - hx),
                    rng.uniform(hy, cfg.room_extents.y - hy), box.dims.z / 2};

      // Require clearance: the candidate dilated by 1 cm must stay disjoint,
      // so exact IoU against the accepted layout is identically zero.
      OrientedBox3D dilated = box;
      dilated.dims += Vec3d{0.01, 0.01, 0.01};
      bool disjoint = true;
      for (const auto& other : placed)
        if (box_intersection_volume(dilated, other) > 0.0) {
          disjoint = false;
          break;
        }
      if (!disjoint) continue;

      placed.push_back(box);
      const auto& category =
          cfg.foreground_categories[static_cast<std::size_t>(i) % cfg.foreground_categories.size()];
      scene.objects.push_back({next_id++, category, box});
      ok = true;
    }
    if (!ok)
      throw PlacementFailure("generate_scene: could not place object " + std::to_string(i) +
                             " within retry budget");
  }
  detail::add_background(scene, cfg, next_id);
  return scene;
}

}  // namespace det4d
