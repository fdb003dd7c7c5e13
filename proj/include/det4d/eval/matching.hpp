#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "det4d/geometry/iou.hpp"
#include "det4d/geometry/transform.hpp"
#include "det4d/io/dataset.hpp"

namespace det4d {

/// One ground-truth box instance in one frame, in that frame's camera
/// coordinates.
struct GroundTruthRecord {
  std::string sequence_id;
  int frame_index = 0;
  std::int32_t instance_id = 0;
  std::string category;
  OrientedBox3D box;
};

/// Greedy score-ordered assignment: predictions sorted by descending score
/// each take the unmatched ground-truth box of highest IoU3D at or above the
/// threshold, restricted to the same sequence, same frame, and same category
/// (category checks apply only when both sides carry one).
struct MatchResult {
  struct Pair {
    std::size_t pred_index = 0;
    std::size_t gt_index = 0;
    double iou = 0.0;
  };
  std::vector<Pair> matches;
  std::vector<std::size_t> unmatched_preds;
  std::vector<std::size_t> unmatched_gts;
};

namespace eval_detail {

inline bool category_compatible(const std::string& a, const std::string& b) {
  return a.empty() || b.empty() || a == b;
}

inline std::vector<std::size_t> score_order(std::span<const PredictionRecord> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].score > preds[b].score;
  });
  return order;
}

}  // namespace eval_detail

inline MatchResult match_predictions(std::span<const PredictionRecord> preds,
                                     std::span<const GroundTruthRecord> gts, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("match_predictions: tau must be in (0, 1)");
  MatchResult result;
  std::vector<std::uint8_t> gt_taken(gts.size(), 0);
  std::vector<std::uint8_t> pred_matched(preds.size(), 0);

  for (const std::size_t pi : eval_detail::score_order(preds)) {
    const auto& p = preds[pi];
    double best_iou = 0.0;
    std::size_t best_gt = gts.size();
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const auto& g = gts[gi];
      if (g.sequence_id != p.sequence_id || g.frame_index != p.frame_index) continue;
      if (!eval_detail::category_compatible(g.category, p.category)) continue;
      const double iou = iou3d(p.box, g.box);
      if (iou >= tau && iou > best_iou) {
        best_iou = iou;
        best_gt = gi;
      }
    }
    if (best_gt < gts.size()) {
      gt_taken[best_gt] = 1;
      pred_matched[pi] = 1;
      result.matches.push_back({pi, best_gt, best_iou});
    }
  }
  for (std::size_t pi = 0; pi < preds.size(); ++pi)
    if (!pred_matched[pi]) result.unmatched_preds.push_back(pi);
  for (std::size_t gi = 0; gi < gts.size(); ++gi)
    if (!gt_taken[gi]) result.unmatched_gts.push_back(gi);
  return result;
}

}  // namespace det4d
