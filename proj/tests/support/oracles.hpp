#pragma once

// Independent reference computations the test suites check the library
// against. Nothing here may call into the code paths under test beyond
// plain type construction.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "det4d/core/rng.hpp"
#include "det4d/core/vec.hpp"
#include "det4d/geometry/box.hpp"
#include "det4d/geometry/quaternion.hpp"

namespace det4d::oracles {

inline bool point_in_box(const OrientedBox3D& box, const Vec3d& p) {
  const Vec3d local = box.rotation.transposed() * (p - box.center);
  return std::abs(local.x) <= box.dims.x / 2 && std::abs(local.y) <= box.dims.y / 2 &&
         std::abs(local.z) <= box.dims.z / 2;
}

struct Aabb {
  Vec3d lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max()};
  Vec3d hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
           std::numeric_limits<double>::lowest()};

  void expand(const Vec3d& p) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
};

inline Aabb box_aabb(const OrientedBox3D& box) {
  Aabb r;
  for (const Vec3d& c : box_corners(box)) r.expand(c);
  return r;
}

/// Monte-Carlo IoU of two oriented boxes. Samples uniformly inside the
/// intersection of the two axis-aligned bounding boxes, which keeps the
/// estimator variance far below naive in-box sampling.
inline double mc_iou3d(const OrientedBox3D& a, const OrientedBox3D& b, long n_samples,
                       std::uint64_t seed) {
  const double va = a.dims.x * a.dims.y * a.dims.z;
  const double vb = b.dims.x * b.dims.y * b.dims.z;
  if (va <= 0.0 || vb <= 0.0) return 0.0;

  const Aabb aa = box_aabb(a);
  const Aabb ab = box_aabb(b);
  Vec3d lo, hi;
  for (int axis = 0; axis < 3; ++axis) {
    lo[axis] = std::max(aa.lo[axis], ab.lo[axis]);
    hi[axis] = std::min(aa.hi[axis], ab.hi[axis]);
    if (lo[axis] >= hi[axis]) return 0.0;
  }
  const double cell = (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);

  Rng rng(seed);
  long hits = 0;
  for (long i = 0; i < n_samples; ++i) {
    const Vec3d p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)};
    if (point_in_box(a, p) && point_in_box(b, p)) ++hits;
  }
  const double inter = cell * static_cast<double>(hits) / static_cast<double>(n_samples);
  return inter / (va + vb - inter);
}

/// Brute-force symmetric Chamfer distance.
inline double brute_chamfer(const std::vector<Vec3d>& a, const std::vector<Vec3d>& b) {
  const auto one_way = [](const std::vector<Vec3d>& from, const std::vector<Vec3d>& to) {
    double sum = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::max();
      for (const auto& q : to) best = std::min(best, (p - q).norm());
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return 0.5 * (one_way(a, b) + one_way(b, a));
}

inline Mat3d random_rotation(Rng& rng) {
  Quaterniond q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  return q.normalized().to_rotation();
}

inline OrientedBox3D random_box(Rng& rng, bool gravity_aligned) {
  OrientedBox3D box;
  box.center = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
  box.dims = {rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5)};
  box.rotation = gravity_aligned ? yaw_rotation(rng.uniform(-M_PI, M_PI)) : random_rotation(rng);
  return box;
}

/// A pair with a decent chance of overlap: the second box is the first,
/// jittered.
inline std::pair<OrientedBox3D, OrientedBox3D> random_box_pair(Rng& rng, bool gravity_aligned) {
  OrientedBox3D a = random_box(rng, gravity_aligned);
  OrientedBox3D b = a;
  b.center += Vec3d{rng.normal(0.0, 0.6), rng.normal(0.0, 0.6), rng.normal(0.0, 0.6)};
  b.dims = {rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5), rng.uniform(0.3, 2.5)};
  b.rotation = gravity_aligned ? yaw_rotation(rng.uniform(-M_PI, M_PI)) : random_rotation(rng);
  return {a, b};
}

}  // namespace det4d::oracles
