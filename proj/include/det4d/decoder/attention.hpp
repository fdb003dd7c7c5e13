#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "det4d/decoder/tensor.hpp"

namespace det4d {

enum class MaskGranularity {
  FrameBlock,  // full attention within a frame, causal across frames
  TokenLevel,  // strict lower-triangular over flattened positions
};

/// Boolean attention mask: allow(query row, key column).
struct CausalMask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> allow;

  bool operator()(int q, int k) const {
    return allow[static_cast<std::size_t>(q) * cols + k] != 0;
  }
};

/// Self-attention mask over frames x per_frame flattened positions: position
/// i may look at position j iff frame(j) <= frame(i).
inline CausalMask build_causal_mask(int frames, int per_frame,
                                    MaskGranularity granularity = MaskGranularity::FrameBlock) {
  if (frames < 1 || per_frame < 1) throw DimMismatch("build_causal_mask: sizes must be >= 1");
  const int n = frames * per_frame;
  CausalMask m{n, n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 0)};
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < n; ++k) {
      const bool ok = granularity == MaskGranularity::FrameBlock
                          ? (k / per_frame) <= (q / per_frame)
                          : k <= q;
      m.allow[static_cast<std::size_t>(q) * n + k] = ok ? 1 : 0;
    }
  return m;
}

/// Cross-attention mask between two frame-aligned grids: a query of frame f
/// may look at keys of frames <= f.
inline CausalMask build_cross_frame_mask(int frames, int queries_per_frame, int keys_per_frame) {
  const int nq = frames * queries_per_frame;
  const int nk = frames * keys_per_frame;
  CausalMask m{nq, nk, std::vector<std::uint8_t>(static_cast<std::size_t>(nq) * nk, 0)};
  for (int q = 0; q < nq; ++q)
    for (int k = 0; k < nk; ++k)
      m.allow[static_cast<std::size_t>(q) * nk + k] =
          (k / keys_per_frame) <= (q / queries_per_frame) ? 1 : 0;
  return m;
}

/// Scaled dot-product attention. Disallowed or invalid keys are excluded from
/// the softmax outright (the -inf bias convention, kept finite); a query row
/// whose keys are all excluded yields zeros.
template <class S>
Matrix<S> attention(const Matrix<S>& q, const Matrix<S>& k, const Matrix<S>& v,
                    const CausalMask& mask, const std::vector<std::uint8_t>& key_valid) {
  if (q.cols() != k.cols() || k.rows() != v.rows()) throw DimMismatch("attention: shape mismatch");
  if (mask.rows != q.rows() || mask.cols != k.rows())
    throw DimMismatch("attention: mask shape mismatch");
  if (key_valid.size() != static_cast<std::size_t>(k.rows()))
    throw DimMismatch("attention: key validity size mismatch");
  using std::exp;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(q.cols()));

  Matrix<S> out(q.rows(), v.cols());
  std::vector<S> scores(static_cast<std::size_t>(k.rows()));
  for (int i = 0; i < q.rows(); ++i) {
    bool any = false;
    double row_max = 0.0;
    for (int j = 0; j < k.rows(); ++j) {
      if (!mask(i, j) || key_valid[static_cast<std::size_t>(j)] == 0) continue;
      S s(0);
      for (int c = 0; c < q.cols(); ++c) s += q(i, c) * k(j, c);
      s = s * inv_sqrt_d;
      scores[static_cast<std::size_t>(j)] = s;
      const double sv = value_of(s);
      row_max = any ? std::max(row_max, sv) : sv;
      any = true;
    }
    if (!any) continue;  // all keys excluded: zero output row
    S denom(0);
    for (int j = 0; j < k.rows(); ++j) {
      if (!mask(i, j) || key_valid[static_cast<std::size_t>(j)] == 0) continue;
      const S e = exp(scores[static_cast<std::size_t>(j)] - row_max);
      denom += e;
      for (int c = 0; c < v.cols(); ++c) out(i, c) += e * v(j, c);
    }
    for (int c = 0; c < v.cols(); ++c) out(i, c) = out(i, c) / denom;
  }
  return out;
}

}  // namespace det4d
