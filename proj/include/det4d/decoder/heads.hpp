#pragma once

#include <cmath>
#include <vector>

#include "det4d/decoder/tensor.hpp"
#include "det4d/loss/params.hpp"

namespace det4d {

template <class S>
S softplus(const S& x) {
  using std::exp;
  using std::log1p;
  if (value_of(x) > 30.0) return x;
  return log1p(exp(x));
}

/// Tiny affine multi-task heads on top of the decoder states.
struct HeadWeights {
  Matrix<double> box;   // 7 x dim, row-major outputs [cx cy cz w h l yaw]
  std::vector<double> box_bias;
  Matrix<double> pose;  // 8 x dim, outputs [tx ty tz qw qx qy qz fov]
  std::vector<double> pose_bias;

  static HeadWeights seeded(int dim, std::uint64_t seed) {
    Rng rng(seed);
    HeadWeights w;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    w.box = Matrix<double>(7, dim);
    for (auto& v : w.box.data()) v = rng.normal(0.0, scale);
    w.box_bias.assign(7, 0.0);
    w.pose = Matrix<double>(8, dim);
    for (auto& v : w.pose.data()) v = rng.normal(0.0, scale);
    w.pose_bias.assign(8, 0.0);
    return w;
  }

  static HeadWeights zeros(int dim) {
    HeadWeights w;
    w.box = Matrix<double>(7, dim);
    w.box_bias.assign(7, 0.0);
    w.pose = Matrix<double>(8, dim);
    w.pose_bias.assign(8, 0.0);
    return w;
  }
};

template <class S>
struct HeadOutputs {
  std::vector<BoxParamsT<S>> boxes;   // one per token position (frames * per_frame)
  std::vector<PoseParamsT<S>> poses;  // one per frame
};

/// Box head: per-token affine map, dimensions squashed through softplus so
/// they stay positive. Pose head: affine map of the frame's mean valid
/// state; the quaternion is normalized, falling back to identity when the
/// raw vector vanishes (e.g. all-zero weights).
template <class S>
HeadOutputs<S> heads_forward(const TokenTensor<S>& states, const HeadWeights& w) {
  if (w.box.cols() != states.dim) throw DimMismatch("heads_forward: weight dim mismatch");
  using std::sqrt;
  HeadOutputs<S> out;

  const auto affine = [&](const Matrix<double>& weights, const std::vector<double>& bias,
                          const std::vector<S>& x) {
    std::vector<S> y(static_cast<std::size_t>(weights.rows()));
    for (int r = 0; r < weights.rows(); ++r) {
      S acc(bias[static_cast<std::size_t>(r)]);
      for (int c = 0; c < weights.cols(); ++c) acc += x[static_cast<std::size_t>(c)] * weights(r, c);
      y[static_cast<std::size_t>(r)] = acc;
    }
    return y;
  };

  std::vector<S> row(static_cast<std::size_t>(states.dim));
  for (int p = 0; p < states.positions(); ++p) {
    for (int c = 0; c < states.dim; ++c) row[static_cast<std::size_t>(c)] = states.values(p, c);
    const auto y = affine(w.box, w.box_bias, row);
    BoxParamsT<S> box;
    box.center = {y[0], y[1], y[2]};
    box.dims = {softplus(y[3]), softplus(y[4]), softplus(y[5])};
    box.yaw = y[6];
    out.boxes.push_back(std::move(box));
  }

  for (int f = 0; f < states.frames; ++f) {
    std::vector<S> pooled(static_cast<std::size_t>(states.dim), S(0));
    int n_valid = 0;
    for (int i = 0; i < states.per_frame; ++i) {
      const int p = f * states.per_frame + i;
      if (!states.is_valid(p)) continue;
      ++n_valid;
      for (int c = 0; c < states.dim; ++c) pooled[static_cast<std::size_t>(c)] += states.values(p, c);
    }
    if (n_valid > 0) {
      const S inv(1.0 / n_valid);
      for (auto& v : pooled) v = v * inv;
    }
    const auto y = affine(w.pose, w.pose_bias, pooled);
    PoseParamsT<S> pose;
    pose.translation = {y[0], y[1], y[2]};
    Quaternion<S> q{y[3], y[4], y[5], y[6]};
    const S n2 = q.squared_norm();
    if (value_of(n2) < 1e-24) {
      pose.rotation = {S(1), S(0), S(0), S(0)};
    } else {
      const S inv_n = S(1) / sqrt(n2);
      pose.rotation = {q.w * inv_n, q.x * inv_n, q.y * inv_n, q.z * inv_n};
    }
    pose.fov = y[7];
    out.poses.push_back(std::move(pose));
  }
  return out;
}

}  // namespace det4d
