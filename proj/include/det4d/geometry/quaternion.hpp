#pragma once

#include <cmath>

#include "det4d/core/dual.hpp"
#include "det4d/core/vec.hpp"

namespace det4d {

template <class S>
struct Quaternion {
  S w{}, x{}, y{}, z{};

  S squared_norm() const { return w * w + x * x + y * y + z * z; }
  S norm() const {
    using std::sqrt;
    return sqrt(squared_norm());
  }

  Quaternion normalized() const {
    const S n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  /// Flips sign so that w >= 0, mapping both covers of a rotation to one
  /// representative.
  Quaternion canonical() const {
    if (value_of(w) < 0.0) return {-w, -x, -y, -z};
    return *this;
  }

  /// Rotation matrix of a unit quaternion.
  Mat3<S> to_rotation() const {
    Mat3<S> r;
    const S xx = x * x, yy = y * y, zz = z * z;
    const S xy = x * y, xz = x * z, yz = y * z;
    const S wx = w * x, wy = w * y, wz = w * z;
    r(0, 0) = S(1) - S(2) * (yy + zz);
    r(0, 1) = S(2) * (xy - wz);
    r(0, 2) = S(2) * (xz + wy);
    r(1, 0) = S(2) * (xy + wz);
    r(1, 1) = S(1) - S(2) * (xx + zz);
    r(1, 2) = S(2) * (yz - wx);
    r(2, 0) = S(2) * (xz - wy);
    r(2, 1) = S(2) * (yz + wx);
    r(2, 2) = S(1) - S(2) * (xx + yy);
    return r;
  }
};

using Quaterniond = Quaternion<double>;

/// Shepperd's method; returns the canonical (w >= 0) unit quaternion.
inline Quaterniond rotation_to_quaternion(const Mat3d& m) {
  Quaterniond q;
  const double trace = m(0, 0) + m(1, 1) + m(2, 2);
  if (trace > 0.0) {
    const double s = std::sqrt(trace + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m(2, 1) - m(1, 2)) / s;
    q.y = (m(0, 2) - m(2, 0)) / s;
    q.z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    const double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
    q.w = (m(2, 1) - m(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (m(0, 1) + m(1, 0)) / s;
    q.z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    const double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
    q.w = (m(0, 2) - m(2, 0)) / s;
    q.x = (m(0, 1) + m(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
    q.w = (m(1, 0) - m(0, 1)) / s;
    q.x = (m(0, 2) + m(2, 0)) / s;
    q.y = (m(1, 2) + m(2, 1)) / s;
    q.z = 0.25 * s;
  }
  return q.normalized().canonical();
}

}  // namespace det4d
