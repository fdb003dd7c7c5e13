#pragma once

#include "det4d/core/errors.hpp"
#include "det4d/core/vec.hpp"

namespace det4d {

/// Proper rigid motion: x -> R x + t.
struct RigidTransform {
  Mat3d rotation = Mat3d::identity();
  Vec3d translation{};

  static RigidTransform identity() { return {}; }

  Vec3d apply(const Vec3d& p) const { return rotation * p + translation; }

  /// this ∘ other: apply `other` first.
  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  RigidTransform inverse() const {
    const Mat3d rt = rotation.transposed();
    return {rt, -(rt * translation)};
  }

  void validate(double tol = 1e-9) const {
    if (!is_rotation(rotation, tol))
      throw ConfigError("rigid transform: rotation matrix is not orthonormal");
  }
};

}  // namespace det4d
