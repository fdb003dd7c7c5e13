#pragma once

#include "det4d/decoder/cab.hpp"

namespace det4d {

/// Three-block spatiotemporal decoder: one CAB integrates tokens with image
/// embeddings, a second integrates tokens with geometry embeddings to produce
/// the geometry control embedding, and a third fuses the first block's token
/// output (query side) with that control embedding into the implicit states
/// the heads consume.
struct DecoderWeights {
  int dim = 32;
  MaskGranularity granularity = MaskGranularity::FrameBlock;
  CabWeights image_block;
  CabWeights geometry_block;
  CabWeights fusion_block;

  static DecoderWeights seeded(int dim, std::uint64_t seed,
                               MaskGranularity granularity = MaskGranularity::FrameBlock) {
    Rng rng(seed);
    DecoderWeights w;
    w.dim = dim;
    w.granularity = granularity;
    w.image_block = CabWeights::seeded(dim, rng);
    w.geometry_block = CabWeights::seeded(dim, rng);
    w.fusion_block = CabWeights::seeded(dim, rng);
    return w;
  }
};

template <class S>
TokenTensor<S> decoder_forward(const TokenTensor<S>& tokens, const EmbeddingTensor<S>& image_emb,
                               const EmbeddingTensor<S>& geometry_emb, const DecoderWeights& w) {
  if (tokens.dim != w.dim) throw DimMismatch("decoder_forward: token dim != decoder dim");
  if (tokens.frames != image_emb.frames || tokens.frames != geometry_emb.frames)
    throw DimMismatch("decoder_forward: inputs disagree on frame count");

  auto [tok_img, img_out] = cab_forward(tokens, image_emb, w.image_block, w.granularity);
  auto [geo_control, geo_out] = cab_forward(tokens, geometry_emb, w.geometry_block, w.granularity);
  (void)img_out;
  (void)geo_out;
  auto [states, control_out] = cab_forward(tok_img, geo_control, w.fusion_block, w.granularity);
  (void)control_out;
  return states;
}

}  // namespace det4d
