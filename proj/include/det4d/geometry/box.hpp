#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "det4d/core/dual.hpp"
#include "det4d/core/errors.hpp"
#include "det4d/core/vec.hpp"
#include "det4d/geometry/transform.hpp"

namespace det4d {

/// Oriented cuboid: local x carries w, local y carries h, local z carries l.
/// Rotation maps box-local directions into the surrounding frame.
template <class S>
struct OrientedBoxT {
  Vec3<S> center{};
  Vec3<S> dims{};  // (w, h, l), all >= 0
  Mat3<S> rotation = Mat3<S>::identity();

  S volume() const { return dims.x * dims.y * dims.z; }
};

using OrientedBox3D = OrientedBoxT<double>;
using PointCloud3D = std::vector<Vec3d>;

/// Pure rotation about +z (the world up axis).
template <class S>
Mat3<S> yaw_rotation(const S& yaw) {
  using std::cos;
  using std::sin;
  const S c = cos(yaw);
  const S s = sin(yaw);
  Mat3<S> r = Mat3<S>::identity();
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return r;
}

inline double extract_yaw(const Mat3d& r) { return std::atan2(r(1, 0), r(0, 0)); }

/// True when the rotation is a pure yaw (about +z) within `tol`, entrywise.
inline bool is_gravity_aligned(const Mat3d& r, double tol = 1e-6) {
  const Mat3d pure = yaw_rotation(extract_yaw(r));
  for (int i = 0; i < 9; ++i)
    if (std::abs(r.m[static_cast<std::size_t>(i)] - pure.m[static_cast<std::size_t>(i)]) > tol)
      return false;
  return true;
}

template <class S>
OrientedBoxT<S> gravity_aligned_box(const Vec3<S>& center, const Vec3<S>& dims, const S& yaw) {
  return {center, dims, yaw_rotation(yaw)};
}

/// The eight vertices in canonical order: corner b has local offset sign
/// (+ if bit set, - otherwise) with bit0 -> x, bit1 -> y, bit2 -> z.
template <class S>
std::array<Vec3<S>, 8> box_corners(const OrientedBoxT<S>& box) {
  std::array<Vec3<S>, 8> out;
  const Vec3<S> half = box.dims / S(2);
  for (int b = 0; b < 8; ++b) {
    const Vec3<S> local{(b & 1) ? half.x : -half.x, (b & 2) ? half.y : -half.y,
                        (b & 4) ? half.z : -half.z};
    out[static_cast<std::size_t>(b)] = box.center + box.rotation * local;
  }
  return out;
}

template <class S>
OrientedBoxT<S> transform_box(const Mat3<S>& r, const Vec3<S>& t, const OrientedBoxT<S>& box) {
  return {r * box.center + t, box.dims, r * box.rotation};
}

inline OrientedBox3D transform_box(const RigidTransform& tf, const OrientedBox3D& box) {
  return transform_box(tf.rotation, tf.translation, box);
}

/// Signed distances of `p` to the box faces are all <= tol.
inline bool box_contains(const OrientedBox3D& box, const Vec3d& p, double tol = 1e-9) {
  const Vec3d local = box.rotation.transposed() * (p - box.center);
  return std::abs(local.x) <= box.dims.x / 2 + tol && std::abs(local.y) <= box.dims.y / 2 + tol &&
         std::abs(local.z) <= box.dims.z / 2 + tol;
}

/// Minimal box of orientation `rotation` enclosing all points: extents are the
/// axis-aligned min/max in the rotated frame.
inline OrientedBox3D tight_fitting_box(const PointCloud3D& points, const Mat3d& rotation) {
  if (points.empty()) throw EmptySet("tight_fitting_box: no points");
  const Mat3d rt = rotation.transposed();
  Vec3d lo = rt * points.front();
  Vec3d hi = lo;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec3d q = rt * points[i];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], q[a]);
      hi[a] = std::max(hi[a], q[a]);
    }
  }
  const Vec3d mid = (lo + hi) / 2.0;
  return {rotation * mid, hi - lo, rotation};
}

}  // namespace det4d
