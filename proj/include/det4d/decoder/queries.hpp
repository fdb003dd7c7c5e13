#pragma once

#include <algorithm>
#include <cmath>

#include "det4d/annotate/annotation.hpp"
#include "det4d/core/rng.hpp"
#include "det4d/decoder/tensor.hpp"

namespace det4d {

/// Fixed sinusoidal embedding of a 2D box prompt: the four corner
/// coordinates, normalized to [0, 1] by the image size, each expanded into
/// dim/8 (sin, cos) pairs over octave frequencies. Any remainder channels
/// stay zero.
inline std::vector<double> encode_prompt(const Rect2D& prompt, const CameraIntrinsics& k,
                                         int dim) {
  std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
  const double coords[4] = {prompt.x0 / k.width, prompt.y0 / k.height, prompt.x1 / k.width,
                            prompt.y1 / k.height};
  const int pairs_per_coord = dim / 8;
  int idx = 0;
  for (double c : coords)
    for (int f = 0; f < pairs_per_coord; ++f) {
      const double angle = c * M_PI * static_cast<double>(1 << f);
      out[static_cast<std::size_t>(idx++)] = std::sin(angle);
      out[static_cast<std::size_t>(idx++)] = std::cos(angle);
    }
  return out;
}

struct PaddedQueries {
  TokenTensor<double> tokens;
  std::vector<std::uint8_t> loss_mask;  // frames * per_frame, true = real query
};

/// Equalizes the query count across frames: every frame gets
/// max(per-frame annotation count, 1) slots, real prompts are embedded, and
/// padded slots are zeroed with their mask cleared so attention and losses
/// both skip them.
inline PaddedQueries pad_queries(const SequenceClip& clip, int dim) {
  if (clip.frames.empty()) throw ConfigError("pad_queries: empty clip");
  int n = 1;
  for (const auto& f : clip.frames)
    n = std::max(n, static_cast<int>(f.annotations.size()));

  PaddedQueries out;
  out.tokens = TokenTensor<double>(static_cast<int>(clip.frames.size()), n, dim);
  out.tokens.valid.assign(out.tokens.valid.size(), 0);
  for (std::size_t f = 0; f < clip.frames.size(); ++f) {
    const auto& frame = clip.frames[f];
    for (std::size_t i = 0; i < frame.annotations.size(); ++i) {
      const int p = static_cast<int>(f) * n + static_cast<int>(i);
      const auto enc = encode_prompt(frame.annotations[i].prompt, frame.intrinsics, dim);
      for (int c = 0; c < dim; ++c) out.tokens.values(p, c) = enc[static_cast<std::size_t>(c)];
      out.tokens.valid[static_cast<std::size_t>(p)] = 1;
    }
  }
  out.loss_mask = out.tokens.valid;
  return out;
}

/// Random contiguous crop: length uniform in [1, min(max_len, len)], start
/// uniform over the valid range, re-anchored so the crop's first frame is the
/// reference. Single-frame clips pass through untouched.
inline SequenceClip crop_sequence(const SequenceClip& clip, int max_len, std::uint64_t seed) {
  if (max_len < 1) throw ConfigError("crop_sequence: max_len must be >= 1");
  const int len = static_cast<int>(clip.frames.size());
  if (len <= 1) return clip;
  Rng rng(seed);
  const int crop_len = static_cast<int>(rng.uniform_int(1, std::min(max_len, len)));
  const int start = static_cast<int>(rng.uniform_int(0, len - crop_len));
  SequenceClip out;
  out.id = clip.id;
  out.frames.assign(clip.frames.begin() + start, clip.frames.begin() + start + crop_len);
  return rereference(out);
}

}  // namespace det4d
