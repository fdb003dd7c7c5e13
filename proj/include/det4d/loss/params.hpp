#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "det4d/core/dual.hpp"
#include "det4d/core/errors.hpp"
#include "det4d/geometry/box.hpp"
#include "det4d/geometry/quaternion.hpp"

namespace det4d {

/// Differentiable parameter vector of a gravity-aligned box:
/// [cx, cy, cz, w, h, l, yaw].
template <class S>
struct BoxParamsT {
  Vec3<S> center{};
  Vec3<S> dims{};
  S yaw{};

  static constexpr std::size_t kCount = 7;

  OrientedBoxT<S> to_box() const { return gravity_aligned_box(center, dims, yaw); }
};

using BoxParams = BoxParamsT<double>;

/// Differentiable camera pose: translation, unit quaternion (canonical sign
/// w >= 0), vertical field of view. [tx, ty, tz, qw, qx, qy, qz, fov].
template <class S>
struct PoseParamsT {
  Vec3<S> translation{};
  Quaternion<S> rotation{S(1), S(0), S(0), S(0)};
  S fov{};

  static constexpr std::size_t kCount = 8;
};

using PoseParams = PoseParamsT<double>;

/// Scalar loss plus partial derivatives with respect to the declared
/// parameter layout of the operation that produced it.
struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;
};

namespace loss_detail {

inline LossValue finish(const Dual& result, std::size_t n_params) {
  LossValue out;
  out.value = result.value();
  out.gradient.assign(n_params, 0.0);
  for (std::size_t j = 0; j < result.deriv().size() && j < n_params; ++j)
    out.gradient[j] = result.deriv()[j];
  return out;
}

inline BoxParamsT<Dual> seed_box(const BoxParams& p, std::size_t offset, std::size_t total) {
  BoxParamsT<Dual> d;
  d.center = {Dual::variable(p.center.x, offset + 0, total),
              Dual::variable(p.center.y, offset + 1, total),
              Dual::variable(p.center.z, offset + 2, total)};
  d.dims = {Dual::variable(p.dims.x, offset + 3, total),
            Dual::variable(p.dims.y, offset + 4, total),
            Dual::variable(p.dims.z, offset + 5, total)};
  d.yaw = Dual::variable(p.yaw, offset + 6, total);
  return d;
}

inline PoseParamsT<Dual> seed_pose(const PoseParams& p, std::size_t offset, std::size_t total) {
  PoseParamsT<Dual> d;
  d.translation = {Dual::variable(p.translation.x, offset + 0, total),
                   Dual::variable(p.translation.y, offset + 1, total),
                   Dual::variable(p.translation.z, offset + 2, total)};
  d.rotation = {Dual::variable(p.rotation.w, offset + 3, total),
                Dual::variable(p.rotation.x, offset + 4, total),
                Dual::variable(p.rotation.y, offset + 5, total),
                Dual::variable(p.rotation.z, offset + 6, total)};
  d.fov = Dual::variable(p.fov, offset + 7, total);
  return d;
}

template <class S>
OrientedBoxT<S> box_cast(const OrientedBox3D& b) {
  OrientedBoxT<S> out;
  out.center = Vec3<S>(b.center);
  out.dims = Vec3<S>(b.dims);
  out.rotation = Mat3<S>::template cast_from<double>(b.rotation);
  return out;
}

}  // namespace loss_detail

/// Flat layouts used by the gradient checker.
inline std::vector<double> pack(const BoxParams& p) {
  return {p.center.x, p.center.y, p.center.z, p.dims.x, p.dims.y, p.dims.z, p.yaw};
}

inline BoxParams unpack_box(std::span<const double> v, std::size_t offset = 0) {
  if (v.size() < offset + BoxParams::kCount) throw DimMismatch("unpack_box: short vector");
  return {{v[offset + 0], v[offset + 1], v[offset + 2]},
          {v[offset + 3], v[offset + 4], v[offset + 5]},
          v[offset + 6]};
}

inline std::vector<double> pack(const PoseParams& p) {
  return {p.translation.x, p.translation.y, p.translation.z, p.rotation.w,
          p.rotation.x,    p.rotation.y,    p.rotation.z,    p.fov};
}

inline PoseParams unpack_pose(std::span<const double> v, std::size_t offset = 0) {
  if (v.size() < offset + PoseParams::kCount) throw DimMismatch("unpack_pose: short vector");
  return {{v[offset + 0], v[offset + 1], v[offset + 2]},
          {v[offset + 3], v[offset + 4], v[offset + 5], v[offset + 6]},
          v[offset + 7]};
}

}  // namespace det4d
