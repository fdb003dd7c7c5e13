#pragma once

#include <cmath>

#include "det4d/core/rng.hpp"
#include "det4d/decoder/attention.hpp"
#include "det4d/decoder/tensor.hpp"

namespace det4d {

struct LayerNormWeights {
  std::vector<double> gain;
  std::vector<double> bias;

  static LayerNormWeights identity(int dim) {
    return {std::vector<double>(static_cast<std::size_t>(dim), 1.0),
            std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
  }
};

/// Projection set of one attention operation.
struct AttentionWeights {
  Matrix<double> wq, wk, wv, wo;  // all dim x dim

  static AttentionWeights seeded(int dim, Rng& rng) {
    const auto init = [&](Matrix<double>& m) {
      m = Matrix<double>(dim, dim);
      const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
      for (auto& v : m.data()) v = rng.normal(0.0, scale);
    };
    AttentionWeights w;
    init(w.wq);
    init(w.wk);
    init(w.wv);
    init(w.wo);
    return w;
  }
};

/// Causal Attention Block weights: causally masked self-attention over the
/// tokens, then bidirectional cross-attention between tokens and embeddings.
struct CabWeights {
  AttentionWeights self_attn;
  AttentionWeights cross_token_to_emb;
  AttentionWeights cross_emb_to_token;
  LayerNormWeights ln_self, ln_cross_q, ln_emb_kv, ln_emb_q, ln_token_kv;

  static CabWeights seeded(int dim, Rng& rng) {
    CabWeights w;
    w.self_attn = AttentionWeights::seeded(dim, rng);
    w.cross_token_to_emb = AttentionWeights::seeded(dim, rng);
    w.cross_emb_to_token = AttentionWeights::seeded(dim, rng);
    w.ln_self = LayerNormWeights::identity(dim);
    w.ln_cross_q = LayerNormWeights::identity(dim);
    w.ln_emb_kv = LayerNormWeights::identity(dim);
    w.ln_emb_q = LayerNormWeights::identity(dim);
    w.ln_token_kv = LayerNormWeights::identity(dim);
    return w;
  }
};

namespace decoder_detail {

inline constexpr double kLayerNormEps = 1e-5;

template <class S>
Matrix<S> layer_norm(const Matrix<S>& x, const LayerNormWeights& w) {
  using std::sqrt;
  Matrix<S> out(x.rows(), x.cols());
  const S inv_d(1.0 / static_cast<double>(x.cols()));
  for (int i = 0; i < x.rows(); ++i) {
    S mean(0);
    for (int c = 0; c < x.cols(); ++c) mean += x(i, c);
    mean = mean * inv_d;
    S var(0);
    for (int c = 0; c < x.cols(); ++c) {
      const S d = x(i, c) - mean;
      var += d * d;
    }
    var = var * inv_d;
    const S inv_std = S(1) / sqrt(var + S(kLayerNormEps));
    for (int c = 0; c < x.cols(); ++c)
      out(i, c) = (x(i, c) - mean) * inv_std * w.gain[static_cast<std::size_t>(c)] +
                  w.bias[static_cast<std::size_t>(c)];
  }
  return out;
}

/// q_side rows attend to kv_side rows: projected attention with residual onto
/// `residual`, respecting the mask and key validity.
template <class S>
Matrix<S> attend(const Matrix<S>& residual, const Matrix<S>& q_in, const Matrix<S>& kv_in,
                 const AttentionWeights& w, const CausalMask& mask,
                 const std::vector<std::uint8_t>& key_valid) {
  const Matrix<S> q = matmul(q_in, w.wq);
  const Matrix<S> k = matmul(kv_in, w.wk);
  const Matrix<S> v = matmul(kv_in, w.wv);
  const Matrix<S> mixed = matmul(attention(q, k, v, mask, key_valid), w.wo);
  Matrix<S> out = residual;
  for (int i = 0; i < out.rows(); ++i)
    for (int c = 0; c < out.cols(); ++c) out(i, c) += mixed(i, c);
  return out;
}

}  // namespace decoder_detail

/// One Causal Attention Block pass. Tokens first run causally masked
/// self-attention, then tokens and embeddings exchange information through
/// cross-attention in both directions, each direction frame-causal. Pre-norm
/// residual wiring throughout; padded positions stay zero and are never used
/// as keys.
template <class S>
std::pair<TokenTensor<S>, EmbeddingTensor<S>> cab_forward(
    const TokenTensor<S>& tokens, const EmbeddingTensor<S>& embeddings, const CabWeights& w,
    MaskGranularity granularity = MaskGranularity::FrameBlock) {
  if (tokens.dim != embeddings.dim) throw DimMismatch("cab_forward: feature dims differ");
  if (tokens.frames != embeddings.frames) throw DimMismatch("cab_forward: frame counts differ");
  using decoder_detail::attend;
  using decoder_detail::layer_norm;

  const auto self_mask = build_causal_mask(tokens.frames, tokens.per_frame, granularity);
  const auto t2e_mask =
      build_cross_frame_mask(tokens.frames, tokens.per_frame, embeddings.per_frame);
  const auto e2t_mask =
      build_cross_frame_mask(tokens.frames, embeddings.per_frame, tokens.per_frame);

  TokenTensor<S> tok = tokens;
  tok.values = attend(tok.values, layer_norm(tok.values, w.ln_self), layer_norm(tok.values, w.ln_self),
                      w.self_attn, self_mask, tokens.valid);
  tok.zero_invalid();

  tok.values = attend(tok.values, layer_norm(tok.values, w.ln_cross_q),
                      layer_norm(embeddings.values, w.ln_emb_kv), w.cross_token_to_emb, t2e_mask,
                      embeddings.valid);
  tok.zero_invalid();

  EmbeddingTensor<S> emb = embeddings;
  emb.values = attend(emb.values, layer_norm(emb.values, w.ln_emb_q),
                      layer_norm(tok.values, w.ln_token_kv), w.cross_emb_to_token, e2t_mask,
                      tok.valid);
  emb.zero_invalid();

  return {std::move(tok), std::move(emb)};
}

}  // namespace det4d
