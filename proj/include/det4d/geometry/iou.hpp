#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "det4d/core/dual.hpp"
#include "det4d/core/vec.hpp"
#include "det4d/geometry/box.hpp"

namespace det4d {

/// Axis-aligned rectangle, min corner (x0, y0), max corner (x1, y1).
template <class S>
struct Rect2 {
  S x0{}, y0{}, x1{}, y1{};

  S area() const {
    using std::max;
    return max(S(0), x1 - x0) * max(S(0), y1 - y0);
  }
};

using Rect2D = Rect2<double>;

template <class S>
S iou2d(const Rect2<S>& a, const Rect2<S>& b) {
  using std::max;
  using std::min;
  const S iw = min(a.x1, b.x1) - max(a.x0, b.x0);
  const S ih = min(a.y1, b.y1) - max(a.y0, b.y0);
  if (value_of(iw) <= 0.0 || value_of(ih) <= 0.0) return S(0);
  const S inter = iw * ih;
  const S uni = a.area() + b.area() - inter;
  if (value_of(uni) <= 0.0) return S(0);
  return inter / uni;
}

namespace detail {

template <class S>
using Polygon = std::vector<Vec3<S>>;

// Half-space n . x <= c. The surviving region lies behind the plane.
template <class S>
struct HalfSpace {
  Vec3<S> normal;
  S offset;
};

// Clips one convex polygon, appending crossing points to `cut`. Vertices
// within `eps` of the plane count as inside: without the slack, a face lying
// in the clipping plane (exact box-face contact, self-intersection) has every
// vertex at noise-level distance and the crossing interpolation would divide
// noise by noise, planting spurious cut points anywhere along its edges.
template <class S>
Polygon<S> clip_polygon(const Polygon<S>& poly, const HalfSpace<S>& hs, double eps,
                        std::vector<Vec3<S>>& cut) {
  Polygon<S> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3<S>& cur = poly[i];
    const Vec3<S>& nxt = poly[(i + 1) % n];
    const S dc = hs.normal.dot(cur) - hs.offset;
    const S dn = hs.normal.dot(nxt) - hs.offset;
    const bool cur_in = value_of(dc) <= eps;
    const bool nxt_in = value_of(dn) <= eps;
    if (cur_in) out.push_back(cur);
    if (cur_in != nxt_in) {
      S t = dc / (dc - dn);
      if (value_of(t) < 0.0) t = S(0);
      if (value_of(t) > 1.0) t = S(1);
      const Vec3<S> p = cur + (nxt - cur) * t;
      out.push_back(p);
      cut.push_back(p);
    }
  }
  return out;
}

// Orders cap points counter-clockwise about `normal` and drops duplicates.
// Valid because the clipped region is convex, so the cap is a convex polygon.
template <class S>
Polygon<S> build_cap(std::vector<Vec3<S>> points, const Vec3<S>& normal) {
  if (points.size() < 3) return {};
  const Vec3<double> n{value_of(normal.x), value_of(normal.y), value_of(normal.z)};
  const Vec3<double> ref = std::abs(n.x) < 0.9 ? Vec3<double>{1, 0, 0} : Vec3<double>{0, 1, 0};
  Vec3<double> u = n.cross(ref);
  u = u / u.norm();
  // (u, w, n) is right-handed, so ascending angle about (u, w) winds the cap
  // counter-clockwise as seen from +n, giving it outward normal +n.
  const Vec3<double> w = n.cross(u);

  Vec3<double> centroid{};
  for (const auto& p : points)
    centroid += Vec3<double>{value_of(p.x), value_of(p.y), value_of(p.z)};
  centroid = centroid / static_cast<double>(points.size());

  const auto angle_of = [&](const Vec3<S>& p) {
    const Vec3<double> d =
        Vec3<double>{value_of(p.x), value_of(p.y), value_of(p.z)} - centroid;
    return std::atan2(d.dot(w), d.dot(u));
  };
  std::sort(points.begin(), points.end(),
            [&](const Vec3<S>& a, const Vec3<S>& b) { return angle_of(a) < angle_of(b); });

  Polygon<S> cap;
  for (const auto& p : points) {
    if (!cap.empty()) {
      const Vec3<double> d = Vec3<double>{value_of(p.x) - value_of(cap.back().x),
                                          value_of(p.y) - value_of(cap.back().y),
                                          value_of(p.z) - value_of(cap.back().z)};
      if (d.squared_norm() < 1e-20) continue;
    }
    cap.push_back(p);
  }
  if (cap.size() >= 2) {
    const Vec3<double> d = Vec3<double>{value_of(cap.front().x) - value_of(cap.back().x),
                                        value_of(cap.front().y) - value_of(cap.back().y),
                                        value_of(cap.front().z) - value_of(cap.back().z)};
    if (d.squared_norm() < 1e-20) cap.pop_back();
  }
  if (cap.size() < 3) return {};
  return cap;
}

// Outward-wound faces of an oriented box, in the surrounding frame.
template <class S>
std::vector<Polygon<S>> box_faces(const OrientedBoxT<S>& box) {
  const auto c = box_corners(box);
  static constexpr int kFaces[6][4] = {
      {1, 3, 7, 5},  // +x
      {0, 4, 6, 2},  // -x
      {3, 2, 6, 7},  // +y
      {0, 1, 5, 4},  // -y
      {4, 5, 7, 6},  // +z
      {1, 0, 2, 3},  // -z
  };
  std::vector<Polygon<S>> faces;
  faces.reserve(6);
  for (const auto& f : kFaces)
    faces.push_back({c[static_cast<std::size_t>(f[0])], c[static_cast<std::size_t>(f[1])],
                     c[static_cast<std::size_t>(f[2])], c[static_cast<std::size_t>(f[3])]});
  return faces;
}

// The twelve half-spaces whose intersection is the box.
template <class S>
std::vector<HalfSpace<S>> box_half_spaces(const OrientedBoxT<S>& box) {
  std::vector<HalfSpace<S>> hs;
  hs.reserve(6);
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3<S> n = box.rotation.col(axis);
    const S mid = n.dot(box.center);
    const S half = box.dims[axis] / S(2);
    hs.push_back({n, mid + half});
    hs.push_back({-n, -(mid - half)});
  }
  return hs;
}

// Divergence-theorem volume of a closed polytope with outward-wound faces.
template <class S>
S polytope_volume(const std::vector<Polygon<S>>& faces) {
  S six_v(0);
  for (const auto& face : faces) {
    if (face.size() < 3) continue;
    for (std::size_t i = 1; i + 1 < face.size(); ++i)
      six_v += face[0].dot(face[i].cross(face[i + 1]));
  }
  using std::max;
  return max(S(0), six_v / S(6));
}

}  // namespace detail

/// Exact intersection volume of two oriented boxes: box `a`'s polytope is
/// clipped against each of box `b`'s six half-spaces, closing the cut with a
/// cap polygon each time, then integrated.
template <class S>
S box_intersection_volume(const OrientedBoxT<S>& a, const OrientedBoxT<S>& b) {
  auto faces = detail::box_faces(a);
  for (const auto& hs : detail::box_half_spaces(b)) {
    const double eps = 1e-9 * (1.0 + std::abs(value_of(hs.offset)));
    std::vector<Vec3<S>> cut;
    std::vector<detail::Polygon<S>> kept;
    kept.reserve(faces.size() + 1);
    for (const auto& face : faces) {
      auto clipped = detail::clip_polygon(face, hs, eps, cut);
      if (clipped.size() >= 3) kept.push_back(std::move(clipped));
    }
    if (!cut.empty()) {
      auto cap = detail::build_cap(std::move(cut), hs.normal);
      if (!cap.empty()) kept.push_back(std::move(cap));
    }
    faces = std::move(kept);
    if (faces.empty()) return S(0);
  }
  return detail::polytope_volume(faces);
}

/// Intersection-over-union of two oriented boxes. Degenerate boxes (any zero
/// dimension) have zero volume and zero IoU against everything.
template <class S>
S iou3d(const OrientedBoxT<S>& a, const OrientedBoxT<S>& b) {
  using std::min;
  const S va = a.volume();
  const S vb = b.volume();
  if (value_of(va) <= 0.0 || value_of(vb) <= 0.0) return S(0);
  S inter = box_intersection_volume(a, b);
  inter = min(inter, min(va, vb));
  return inter / (va + vb - inter);
}

}  // namespace det4d
