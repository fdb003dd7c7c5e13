#include <gtest/gtest.h>

#include <cmath>

#include "det4d/decoder/decoder.hpp"
#include "det4d/decoder/heads.hpp"
#include "det4d/decoder/queries.hpp"
#include "det4d/decoder/verify.hpp"
#include "det4d/loss/box_losses.hpp"
#include "det4d/loss/consistency_losses.hpp"
#include "det4d/loss/grad_check.hpp"
#include "det4d/loss/pose_losses.hpp"

using namespace det4d;

TEST(CausalMask, Shapes) {
  const auto m1 = build_causal_mask(1, 3);
  for (int q = 0; q < 3; ++q)
    for (int k = 0; k < 3; ++k) EXPECT_TRUE(m1(q, k));

  const auto m2 = build_causal_mask(2, 1);
  EXPECT_TRUE(m2(0, 0));
  EXPECT_FALSE(m2(0, 1));
  EXPECT_TRUE(m2(1, 0));
  EXPECT_TRUE(m2(1, 1));

  const auto m3 = build_causal_mask(3, 2);
  for (int q = 0; q < 6; ++q)
    for (int k = 0; k < 6; ++k)
      EXPECT_EQ(m3(q, k), (k / 2) <= (q / 2)) << q << "," << k;

  const auto strict = build_causal_mask(3, 2, MaskGranularity::TokenLevel);
  for (int q = 0; q < 6; ++q)
    for (int k = 0; k < 6; ++k) EXPECT_EQ(strict(q, k), k <= q);
}

TEST(Attention, SingleKeyAndUniform) {
  // One unmasked key: the output is that key's value row.
  Matrix<double> q(1, 4), k(3, 4), v(3, 2);
  Rng rng(5);
  for (auto& x : q.data()) x = rng.normal();
  for (auto& x : k.data()) x = rng.normal();
  for (auto& x : v.data()) x = rng.normal();
  CausalMask only_second{1, 3, {0, 1, 0}};
  const auto out = attention(q, k, v, only_second, {1, 1, 1});
  EXPECT_NEAR(out(0, 0), v(1, 0), 1e-12);
  EXPECT_NEAR(out(0, 1), v(1, 1), 1e-12);

  // Identical keys: the output is the mean of the value rows.
  Matrix<double> k_same(3, 4);
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 4; ++c) k_same(j, c) = k(0, c);
  CausalMask all{1, 3, {1, 1, 1}};
  const auto mean_out = attention(q, k_same, v, all, {1, 1, 1});
  for (int c = 0; c < 2; ++c)
    EXPECT_NEAR(mean_out(0, c), (v(0, c) + v(1, c) + v(2, c)) / 3.0, 1e-12);
}

TEST(Attention, MaskedKeyValueIrrelevant) {
  Matrix<double> q(2, 4), k(3, 4), v(3, 4);
  Rng rng(6);
  for (auto& x : q.data()) x = rng.normal();
  for (auto& x : k.data()) x = rng.normal();
  for (auto& x : v.data()) x = rng.normal();
  CausalMask mask{2, 3, {1, 1, 0, 1, 0, 1}};
  const auto base = attention(q, k, v, mask, {1, 1, 1});

  // Rewriting a masked key's V (and K) row changes nothing, bit for bit.
  auto k2 = k;
  auto v2 = v;
  k2(2, 0) = 99.0;
  v2(2, 1) = -123.0;
  auto out2 = attention(q, k2, v2, mask, {1, 1, 1});
  EXPECT_EQ(base(0, 0), out2(0, 0));
  EXPECT_EQ(base(0, 3), out2(0, 3));

  // All-masked row yields zeros.
  Matrix<double> q1(1, 4);
  for (auto& x : q1.data()) x = rng.normal();
  CausalMask none{1, 3, {0, 0, 0}};
  const auto zero = attention(q1, k, v, none, {1, 1, 1});
  for (int c = 0; c < 4; ++c) EXPECT_EQ(zero(0, c), 0.0);
}

TEST(Attention, RowsSumToOne) {
  // With V set to a constant-one column, each allowed row returns exactly
  // the softmax mass.
  Matrix<double> q(4, 8), k(6, 8), v(6, 1);
  Rng rng(7);
  for (auto& x : q.data()) x = rng.normal();
  for (auto& x : k.data()) x = rng.normal();
  for (auto& x : v.data()) x = 1.0;
  const auto mask = build_cross_frame_mask(2, 2, 3);
  const auto out = attention(q, k, v, mask, std::vector<std::uint8_t>(6, 1));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(out(i, 0), 1.0, 1e-9);
}

TEST(CabForward, ZeroOutputWeightsIsIdentity) {
  const int d = 16;
  Rng rng(9);
  auto w = CabWeights::seeded(d, rng);
  for (auto& x : w.self_attn.wo.data()) x = 0.0;
  for (auto& x : w.cross_token_to_emb.wo.data()) x = 0.0;
  for (auto& x : w.cross_emb_to_token.wo.data()) x = 0.0;

  auto tokens = decoder_detail::random_grid(3, 2, d, rng);
  auto emb = decoder_detail::random_grid(3, 4, d, rng);
  const auto [tok_out, emb_out] = cab_forward(tokens, emb, w);
  for (std::size_t i = 0; i < tokens.values.data().size(); ++i)
    EXPECT_EQ(tok_out.values.data()[i], tokens.values.data()[i]);
  for (std::size_t i = 0; i < emb.values.data().size(); ++i)
    EXPECT_EQ(emb_out.values.data()[i], emb.values.data()[i]);
}

TEST(CabForward, DeterministicAndCausal) {
  const int d = 16;
  Rng rng(11);
  const auto w = CabWeights::seeded(d, rng);
  auto tokens = decoder_detail::random_grid(4, 2, d, rng);
  auto emb = decoder_detail::random_grid(4, 3, d, rng);

  const auto [a_tok, a_emb] = cab_forward(tokens, emb, w);
  const auto [b_tok, b_emb] = cab_forward(tokens, emb, w);
  EXPECT_EQ(a_tok.values.data(), b_tok.values.data());
  EXPECT_EQ(a_emb.values.data(), b_emb.values.data());

  EXPECT_EQ(cab_causality_leakage(w, 4, 2, 3, d, 20, 77), 0.0);
}

TEST(DecoderForward, ShapeCausalityPadding) {
  const auto w = DecoderWeights::seeded(16, 123);
  Rng rng(13);
  auto tokens = decoder_detail::random_grid(3, 2, 16, rng);
  auto img = decoder_detail::random_grid(3, 4, 16, rng);
  auto geo = decoder_detail::random_grid(3, 3, 16, rng);
  const auto states = decoder_forward(tokens, img, geo, w);
  EXPECT_EQ(states.frames, 3);
  EXPECT_EQ(states.per_frame, 2);
  EXPECT_EQ(states.dim, 16);

  EXPECT_EQ(decoder_causality_leakage(w, 3, 2, 4, 3, 20, 99), 0.0);
  EXPECT_EQ(padding_neutrality_error(w, 3, 2, 2, 4, 3, 10, 55), 0.0);
}

TEST(DecoderForward, SingleFrameWorks) {
  const auto w = DecoderWeights::seeded(16, 5);
  Rng rng(15);
  auto tokens = decoder_detail::random_grid(1, 3, 16, rng);
  auto img = decoder_detail::random_grid(1, 4, 16, rng);
  auto geo = decoder_detail::random_grid(1, 2, 16, rng);
  const auto states = decoder_forward(tokens, img, geo, w);
  EXPECT_EQ(states.positions(), 3);
  for (const auto& v : states.values.data()) EXPECT_TRUE(std::isfinite(v));
}

TEST(HeadsForward, ZeroWeightsGiveCanonicalOutputs) {
  TokenGrid<double> states(2, 2, 8);
  Rng rng(17);
  for (auto& v : states.values.data()) v = rng.normal();
  const auto w = HeadWeights::zeros(8);
  const auto out = heads_forward(states, w);
  ASSERT_EQ(out.boxes.size(), 4u);
  ASSERT_EQ(out.poses.size(), 2u);
  for (const auto& b : out.boxes) {
    EXPECT_NEAR(b.dims.x, std::log(2.0), 1e-12);  // softplus(0)
    EXPECT_EQ(b.center.x, 0.0);
    EXPECT_EQ(b.yaw, 0.0);
  }
  for (const auto& p : out.poses) {
    EXPECT_EQ(p.rotation.w, 1.0);  // identity fallback for the zero quaternion
    EXPECT_EQ(p.rotation.x, 0.0);
  }
}

TEST(HeadsForward, FiniteAndUnitQuaternion) {
  const auto w = HeadWeights::seeded(16, 31);
  TokenGrid<double> states(3, 2, 16);
  Rng rng(19);
  for (auto& v : states.values.data()) v = rng.normal();
  const auto out = heads_forward(states, w);
  for (const auto& b : out.boxes) {
    EXPECT_GT(b.dims.x, 0.0);
    EXPECT_GT(b.dims.y, 0.0);
    EXPECT_GT(b.dims.z, 0.0);
    EXPECT_TRUE(std::isfinite(b.yaw));
  }
  for (const auto& p : out.poses) EXPECT_NEAR(p.rotation.norm(), 1.0, 1e-9);
}

TEST(PadQueries, CountsAndMasks) {
  SequenceClip clip;
  const CameraIntrinsics k{110, 110, 64, 64, 128, 128};
  const int counts[3] = {2, 3, 1};
  for (int f = 0; f < 3; ++f) {
    FrameRecord frame;
    frame.intrinsics = k;
    for (int i = 0; i < counts[f]; ++i) {
      ObjectAnnotation ann;
      ann.instance_id = i + 1;
      ann.prompt = {10.0 + i, 20.0, 40.0 + i, 60.0};
      frame.annotations.push_back(ann);
    }
    clip.frames.push_back(frame);
  }
  const auto padded = pad_queries(clip, 16);
  EXPECT_EQ(padded.tokens.per_frame, 3);
  int valid_per_frame[3] = {0, 0, 0};
  for (int p = 0; p < padded.tokens.positions(); ++p)
    if (padded.tokens.is_valid(p)) ++valid_per_frame[padded.tokens.frame_of(p)];
  EXPECT_EQ(valid_per_frame[0], 2);
  EXPECT_EQ(valid_per_frame[1], 3);
  EXPECT_EQ(valid_per_frame[2], 1);

  // Padded positions carry zeros.
  for (int p = 0; p < padded.tokens.positions(); ++p)
    if (!padded.tokens.is_valid(p))
      for (int c = 0; c < 16; ++c) EXPECT_EQ(padded.tokens.values(p, c), 0.0);

  // Equal counts mean no padding.
  SequenceClip equal = clip;
  equal.frames[0].annotations.push_back(equal.frames[1].annotations[0]);
  equal.frames[2].annotations.push_back(equal.frames[1].annotations[0]);
  equal.frames[2].annotations.push_back(equal.frames[1].annotations[1]);
  const auto no_pad = pad_queries(equal, 16);
  for (int p = 0; p < no_pad.tokens.positions(); ++p) EXPECT_TRUE(no_pad.tokens.is_valid(p));

  // A frame with zero objects is entirely padding (but one slot exists).
  SequenceClip empty;
  FrameRecord bare;
  bare.intrinsics = k;
  empty.frames.push_back(bare);
  const auto all_pad = pad_queries(empty, 16);
  EXPECT_EQ(all_pad.tokens.per_frame, 1);
  EXPECT_FALSE(all_pad.tokens.is_valid(0));
}

TEST(CropSequence, DeterminismAndRereference) {
  Rng rng(23);
  SequenceClip clip;
  clip.id = "crop_test";
  RigidTransform running = RigidTransform::identity();
  for (int f = 0; f < 8; ++f) {
    FrameRecord frame;
    frame.intrinsics = {110, 110, 64, 64, 128, 128};
    frame.pose_ref = running;
    ObjectAnnotation ann;
    ann.instance_id = 1;
    ann.box_ref = {{1, 2, 3}, {1, 1, 1}, yaw_rotation(0.2)};
    ann.box_camera = transform_box(running.inverse(), ann.box_ref);
    ann.prompt = {5, 5, 20, 20};
    frame.annotations.push_back(ann);
    clip.frames.push_back(frame);
    RigidTransform step{yaw_rotation(0.1), {0.2, 0.05 * f, 0}};
    running = running.compose(step);
  }

  const auto a = crop_sequence(clip, 5, 99);
  const auto b = crop_sequence(clip, 5, 99);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  EXPECT_LE(a.frames.size(), 5u);
  EXPECT_GE(a.frames.size(), 1u);
  for (std::size_t i = 0; i < a.frames.size(); ++i)
    EXPECT_EQ((a.frames[i].pose_ref.translation - b.frames[i].pose_ref.translation).norm(), 0.0);

  // The crop's first frame is the new reference.
  EXPECT_NEAR(orthonormality_error(a.frames[0].pose_ref.rotation), 0.0, 1e-9);
  EXPECT_NEAR(a.frames[0].pose_ref.translation.norm(), 0.0, 1e-9);
  const Mat3d r0 = a.frames[0].pose_ref.rotation;
  EXPECT_NEAR(std::abs(r0(0, 0) - 1.0) + std::abs(r0(1, 1) - 1.0) + std::abs(r0(2, 2) - 1.0), 0.0,
              1e-9);

  // Annotation consistency survives the re-anchor.
  for (const auto& frame : a.frames)
    for (const auto& ann : frame.annotations) {
      const auto back = transform_box(frame.pose_ref, ann.box_camera);
      EXPECT_NEAR((back.center - ann.box_ref.center).norm(), 0.0, 1e-9);
    }

  SequenceClip single;
  single.frames.push_back(clip.frames[0]);
  const auto same = crop_sequence(single, 5, 1);
  EXPECT_EQ(same.frames.size(), 1u);
}

// Finite-difference sanity of the full composition: decoder states feed the
// heads, whose boxes and poses feed the detection, pose, and consistency
// losses. Differentiated with respect to the input token features.
TEST(DecoderComposition, GradientSanity) {
  const int frames = 3, n = 2, d = 16;
  const auto w = DecoderWeights::seeded(d, 2024);
  const auto heads = HeadWeights::seeded(d, 2025);
  Rng rng(2026);
  const auto img = decoder_detail::random_grid(frames, 3, d, rng);
  const auto geo = decoder_detail::random_grid(frames, 2, d, rng);
  auto tokens = decoder_detail::random_grid(frames, n, d, rng);

  std::vector<BoxParams> gt_boxes;
  for (int i = 0; i < frames * n; ++i) {
    BoxParams b{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 2)},
                {rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5)},
                rng.uniform(-1, 1)};
    gt_boxes.push_back(b);
  }
  std::vector<PoseParams> gt_poses;
  for (int f = 0; f < frames; ++f) {
    Quaterniond q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    gt_poses.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)},
                        q.normalized().canonical(),
                        rng.uniform(0.8, 1.2)});
  }
  const OrientedBox3D gt_world = gt_boxes[0].to_box();

  const auto loss_of = [&]<class S>(const TokenTensor<S>& toks) -> S {
    const auto states = decoder_forward(toks, EmbeddingTensor<S>::template cast_from<double>(img),
                                        EmbeddingTensor<S>::template cast_from<double>(geo), w);
    const auto out = heads_forward(states, heads);
    S total(0);
    for (std::size_t i = 0; i < out.boxes.size(); ++i)
      total += detection_loss(out.boxes[i], gt_boxes[i]);
    for (std::size_t f = 0; f < out.poses.size(); ++f)
      total += pose_loss(out.poses[f], gt_poses[f]);
    std::vector<BoxParamsT<S>> frame_boxes;
    for (int f = 0; f < frames; ++f) frame_boxes.push_back(out.boxes[static_cast<std::size_t>(f * n)]);
    total += spatial_consistency_loss<S>(frame_boxes, out.poses, gt_world);
    total += temporal_consistency_loss<S>(frame_boxes, out.poses);
    return total;
  };

  // Dual-number pass for the implemented gradient.
  const std::size_t n_params = tokens.values.data().size();
  TokenTensor<Dual> dual_tokens = TokenTensor<Dual>::cast_from<double>(tokens);
  for (std::size_t i = 0; i < n_params; ++i)
    dual_tokens.values.data()[i] = Dual::variable(tokens.values.data()[i], i, n_params);
  const Dual dual_out = loss_of(dual_tokens);
  std::vector<double> gradient(n_params, 0.0);
  for (std::size_t i = 0; i < n_params; ++i) gradient[i] = dual_out.partial(i);

  const auto f = [&](std::span<const double> v) {
    auto probe = tokens;
    std::copy(v.begin(), v.end(), probe.values.data().begin());
    return loss_of(probe);
  };
  const auto res = grad_check(f, gradient, tokens.values.data(), 1e-5);
  EXPECT_LT(res.max_rel_error, 1e-3);
  EXPECT_LT(res.flagged_count, static_cast<int>(n_params) / 4);
}
