#pragma once

#include <span>

#include "det4d/core/dual.hpp"
#include "det4d/core/errors.hpp"
#include "det4d/core/vec.hpp"

namespace det4d {

/// Symmetric Chamfer distance: the mean nearest-neighbor distance in each
/// direction, averaged. Unsquared distances give a result in meters; the
/// squared variant is kept behind a flag since both appear in the wild.
template <class S>
S chamfer(std::span<const Vec3<S>> a, std::span<const Vec3<S>> b, bool squared = false) {
  if (a.empty() || b.empty()) throw EmptySet("chamfer: empty point set");
  using std::sqrt;
  const auto directed = [squared](std::span<const Vec3<S>> from, std::span<const Vec3<S>> to) {
    S total(0);
    for (const Vec3<S>& p : from) {
      S best = (p - to[0]).squared_norm();
      for (std::size_t i = 1; i < to.size(); ++i) {
        const S d2 = (p - to[i]).squared_norm();
        if (d2 < best) best = d2;
      }
      total += squared ? best : sqrt(best);
    }
    return total / S(static_cast<double>(from.size()));
  };
  return (directed(a, b) + directed(b, a)) / S(2);
}

template <class S, std::size_t N, std::size_t M>
S chamfer(const std::array<Vec3<S>, N>& a, const std::array<Vec3<S>, M>& b,
          bool squared = false) {
  return chamfer(std::span<const Vec3<S>>(a), std::span<const Vec3<S>>(b), squared);
}

inline double chamfer(const std::vector<Vec3d>& a, const std::vector<Vec3d>& b,
                      bool squared = false) {
  return chamfer(std::span<const Vec3d>(a), std::span<const Vec3d>(b), squared);
}

}  // namespace det4d
