#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "det4d/decoder/decoder.hpp"

namespace det4d {

namespace decoder_detail {

inline TokenGrid<double> random_grid(int frames, int per_frame, int dim, Rng& rng) {
  TokenGrid<double> g(frames, per_frame, dim);
  for (auto& v : g.values.data()) v = rng.normal();
  return g;
}

inline void perturb_after_frame(TokenGrid<double>& g, int frame, Rng& rng) {
  for (int p = 0; p < g.positions(); ++p) {
    if (g.frame_of(p) <= frame) continue;
    for (int c = 0; c < g.dim; ++c) g.values(p, c) += rng.normal(0.0, 0.5);
  }
}

inline double max_diff_up_to_frame(const TokenGrid<double>& a, const TokenGrid<double>& b,
                                   int frame) {
  double worst = 0.0;
  for (int p = 0; p < a.positions(); ++p) {
    if (a.frame_of(p) > frame) continue;
    for (int c = 0; c < a.dim; ++c)
      worst = std::max(worst, std::abs(a.values(p, c) - b.values(p, c)));
  }
  return worst;
}

}  // namespace decoder_detail

/// Worst-case leakage of future-frame information into past-frame outputs of
/// a single Causal Attention Block, over random trials. Exactly zero means
/// strict causality.
inline double cab_causality_leakage(const CabWeights& w, int frames, int n_tokens, int n_emb,
                                    int dim, int trials, std::uint64_t seed,
                                    MaskGranularity granularity = MaskGranularity::FrameBlock) {
  using namespace decoder_detail;
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    auto tokens = random_grid(frames, n_tokens, dim, rng);
    auto emb = random_grid(frames, n_emb, dim, rng);
    const int t = static_cast<int>(rng.uniform_int(0, frames - 2));
    auto tokens2 = tokens;
    auto emb2 = emb;
    perturb_after_frame(tokens2, t, rng);
    perturb_after_frame(emb2, t, rng);

    const auto [tok_a, emb_a] = cab_forward(tokens, emb, w, granularity);
    const auto [tok_b, emb_b] = cab_forward(tokens2, emb2, w, granularity);
    worst = std::max(worst, max_diff_up_to_frame(tok_a, tok_b, t));
    worst = std::max(worst, max_diff_up_to_frame(emb_a, emb_b, t));
  }
  return worst;
}

/// Same leakage probe through the full three-block decoder.
inline double decoder_causality_leakage(const DecoderWeights& w, int frames, int n_tokens,
                                        int n_img, int n_geo, int trials, std::uint64_t seed) {
  using namespace decoder_detail;
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    auto tokens = random_grid(frames, n_tokens, w.dim, rng);
    auto img = random_grid(frames, n_img, w.dim, rng);
    auto geo = random_grid(frames, n_geo, w.dim, rng);
    const int t = static_cast<int>(rng.uniform_int(0, frames - 2));
    auto tokens2 = tokens;
    auto img2 = img;
    auto geo2 = geo;
    perturb_after_frame(tokens2, t, rng);
    perturb_after_frame(img2, t, rng);
    perturb_after_frame(geo2, t, rng);

    const auto a = decoder_forward(tokens, img, geo, w);
    const auto b = decoder_forward(tokens2, img2, geo2, w);
    worst = std::max(worst, max_diff_up_to_frame(a, b, t));
  }
  return worst;
}

/// Appends padded (invalid, zeroed) query slots and measures the worst change
/// in the outputs at the original positions. Masked keys must contribute
/// nothing, so this is zero for a faithful implementation.
inline double padding_neutrality_error(const DecoderWeights& w, int frames, int n_tokens,
                                       int extra_padding, int n_img, int n_geo, int trials,
                                       std::uint64_t seed) {
  using namespace decoder_detail;
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto tokens = random_grid(frames, n_tokens, w.dim, rng);
    const auto img = random_grid(frames, n_img, w.dim, rng);
    const auto geo = random_grid(frames, n_geo, w.dim, rng);

    TokenGrid<double> padded(frames, n_tokens + extra_padding, w.dim);
    padded.valid.assign(padded.valid.size(), 0);
    for (int f = 0; f < frames; ++f)
      for (int i = 0; i < n_tokens; ++i) {
        const int src = f * n_tokens + i;
        const int dst = f * (n_tokens + extra_padding) + i;
        for (int c = 0; c < w.dim; ++c) padded.values(dst, c) = tokens.values(src, c);
        padded.valid[static_cast<std::size_t>(dst)] = 1;
      }

    const auto base = decoder_forward(tokens, img, geo, w);
    const auto wide = decoder_forward(padded, img, geo, w);
    for (int f = 0; f < frames; ++f)
      for (int i = 0; i < n_tokens; ++i)
        for (int c = 0; c < w.dim; ++c)
          worst = std::max(worst, std::abs(base.values(f * n_tokens + i, c) -
                                           wide.values(f * (n_tokens + extra_padding) + i, c)));
  }
  return worst;
}

}  // namespace det4d
