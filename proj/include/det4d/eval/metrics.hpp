#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>

#include "det4d/eval/matching.hpp"
#include "det4d/geometry/chamfer.hpp"

namespace det4d {

/// The ten matching thresholds used for AP3D.
inline std::vector<double> ap3d_thresholds() {
  std::vector<double> t;
  for (int i = 1; i <= 10; ++i) t.push_back(0.05 * i);
  return t;
}

struct EvalConfig {
  double f1_score_min = 0.5;  // predictions below this score are ignored for F1
  // Variance metrics average over frames where the instance was predicted;
  // with this set, instances missing any frame in which their ground truth
  // appears are excluded from the aggregate instead.
  bool variance_require_full_presence = false;
};

struct ThresholdCounts {
  double threshold = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

struct MetricsReport {
  std::vector<double> ap_per_threshold;
  double ap_mean = 0.0;
  double f1_at_025 = 0.0;
  double f1_at_05 = 0.0;
  bool variance_available = false;
  double var_v = 0.0;
  double var_c = 0.0;
  int variance_instances = 0;
  std::vector<ThresholdCounts> counts;
  std::vector<std::string> warnings;
};

namespace eval_detail {

// IoU between every (prediction, ground truth) pair sharing a frame,
// computed once and reused across thresholds.
struct PairwiseIou {
  // per prediction: candidate (gt index, iou) pairs
  std::vector<std::vector<std::pair<std::size_t, double>>> candidates;
};

inline PairwiseIou precompute_iou(std::span<const PredictionRecord> preds,
                                  std::span<const GroundTruthRecord> gts) {
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> gt_by_frame;
  for (std::size_t gi = 0; gi < gts.size(); ++gi)
    gt_by_frame[{gts[gi].sequence_id, gts[gi].frame_index}].push_back(gi);

  PairwiseIou out;
  out.candidates.resize(preds.size());
  for (std::size_t pi = 0; pi < preds.size(); ++pi) {
    const auto& p = preds[pi];
    const auto it = gt_by_frame.find({p.sequence_id, p.frame_index});
    if (it == gt_by_frame.end()) continue;
    for (const std::size_t gi : it->second) {
      if (!category_compatible(gts[gi].category, p.category)) continue;
      const double iou = iou3d(p.box, gts[gi].box);
      if (iou > 0.0) out.candidates[pi].push_back({gi, iou});
    }
  }
  return out;
}

// Greedy TP/FP flags in descending score order at one threshold.
inline std::vector<std::uint8_t> tp_flags(std::span<const PredictionRecord> preds,
                                          std::size_t n_gts, const PairwiseIou& iou, double tau,
                                          const std::vector<std::size_t>& order) {
  std::vector<std::uint8_t> tp(preds.size(), 0);
  std::vector<std::uint8_t> taken(n_gts, 0);
  for (const std::size_t pi : order) {
    double best = 0.0;
    std::size_t best_gt = n_gts;
    for (const auto& [gi, v] : iou.candidates[pi]) {
      if (taken[gi] || v < tau) continue;
      if (v > best) {
        best = v;
        best_gt = gi;
      }
    }
    if (best_gt < n_gts) {
      taken[best_gt] = 1;
      tp[pi] = 1;
    }
  }
  return tp;
}

// Area under the precision-recall curve with the all-points precision
// envelope.
inline double average_precision(const std::vector<std::uint8_t>& tp,
                                const std::vector<std::size_t>& order, std::size_t n_gts) {
  if (n_gts == 0) return 0.0;
  std::vector<double> precision, recall;
  int tp_count = 0;
  int seen = 0;
  for (const std::size_t pi : order) {
    ++seen;
    if (tp[pi]) ++tp_count;
    precision.push_back(static_cast<double>(tp_count) / seen);
    recall.push_back(static_cast<double>(tp_count) / static_cast<double>(n_gts));
  }
  if (precision.empty()) return 0.0;
  for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i)
    precision[static_cast<std::size_t>(i)] =
        std::max(precision[static_cast<std::size_t>(i)], precision[static_cast<std::size_t>(i) + 1]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

}  // namespace eval_detail

/// Per-threshold and mean average precision over the standard sweep.
inline std::pair<std::vector<double>, double> ap3d(std::span<const PredictionRecord> preds,
                                                   std::span<const GroundTruthRecord> gts) {
  const auto thresholds = ap3d_thresholds();
  const auto order = eval_detail::score_order(preds);
  const auto iou = eval_detail::precompute_iou(preds, gts);
  std::vector<double> per_threshold;
  double sum = 0.0;
  for (const double tau : thresholds) {
    const auto tp = eval_detail::tp_flags(preds, gts.size(), iou, tau, order);
    const double ap = eval_detail::average_precision(tp, order, gts.size());
    per_threshold.push_back(ap);
    sum += ap;
  }
  return {per_threshold, sum / static_cast<double>(thresholds.size())};
}

/// F1 at one IoU threshold over predictions with score >= score_min.
inline double f1_at_iou(std::span<const PredictionRecord> preds,
                        std::span<const GroundTruthRecord> gts, double tau,
                        double score_min = 0.5, ThresholdCounts* counts_out = nullptr) {
  std::vector<PredictionRecord> kept;
  for (const auto& p : preds)
    if (p.score >= score_min) kept.push_back(p);
  const auto result = match_predictions(kept, gts, tau);
  const int tp = static_cast<int>(result.matches.size());
  const int fp = static_cast<int>(result.unmatched_preds.size());
  const int fn = static_cast<int>(result.unmatched_gts.size());
  if (counts_out != nullptr) *counts_out = {tau, tp, fp, fn};
  if (tp == 0) return 0.0;
  return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

/// Temporal variance of one instance's boxes across the frames it was
/// predicted in. Boxes come in per-frame camera coordinates and are lifted
/// to a common frame with the ground-truth poses; the average box is the
/// corner-wise mean in canonical corner order.
inline std::pair<double, double> variance_metrics(std::span<const OrientedBox3D> boxes_cam,
                                                  std::span<const RigidTransform> poses_c2w) {
  if (boxes_cam.empty()) throw InstanceMismatch("variance_metrics: no frames");
  if (boxes_cam.size() != poses_c2w.size())
    throw InstanceMismatch("variance_metrics: boxes and poses differ in length");
  const std::size_t t = boxes_cam.size();

  std::vector<std::array<Vec3d, 8>> world_corners;
  world_corners.reserve(t);
  for (std::size_t i = 0; i < t; ++i)
    world_corners.push_back(box_corners(transform_box(poses_c2w[i], boxes_cam[i])));

  std::array<Vec3d, 8> mean{};
  for (const auto& corners : world_corners)
    for (std::size_t c = 0; c < 8; ++c) mean[c] += corners[c];
  for (auto& m : mean) m = m / static_cast<double>(t);

  Vec3d mean_centroid{};
  for (const auto& c : mean) mean_centroid += c;
  mean_centroid = mean_centroid / 8.0;

  double var_v = 0.0;
  double var_c = 0.0;
  for (const auto& corners : world_corners) {
    var_v += chamfer<double>(corners, mean);
    Vec3d centroid{};
    for (const auto& c : corners) centroid += c;
    centroid = centroid / 8.0;
    var_c += (centroid - mean_centroid).norm();
  }
  return {var_v / static_cast<double>(t), var_c / static_cast<double>(t)};
}

/// Full evaluation: AP sweep, F1 at 0.25 and 0.5, and instance-weighted
/// temporal variance using ground-truth poses. Variance needs instance
/// identity on the prediction side; when it is absent the report carries
/// AP/F1 only.
inline MetricsReport evaluate(std::span<const PredictionRecord> preds,
                              std::span<const GroundTruthRecord> gts,
                              const std::map<std::string, std::vector<RigidTransform>>& gt_poses,
                              const EvalConfig& config = {}) {
  MetricsReport report;
  std::tie(report.ap_per_threshold, report.ap_mean) = ap3d(preds, gts);
  ThresholdCounts c25, c50;
  report.f1_at_025 = f1_at_iou(preds, gts, 0.25, config.f1_score_min, &c25);
  report.f1_at_05 = f1_at_iou(preds, gts, 0.5, config.f1_score_min, &c50);
  report.counts = {c25, c50};

  // Group predictions by (sequence, instance); a usable group needs valid
  // instance ids and pose data for every predicted frame.
  try {
    std::map<std::pair<std::string, std::int32_t>, std::vector<const PredictionRecord*>> groups;
    for (const auto& p : preds) {
      if (p.instance_id <= 0)
        throw InstanceMismatch("evaluate: prediction without instance id for sequence " +
                               p.sequence_id);
      groups[{p.sequence_id, p.instance_id}].push_back(&p);
    }

    std::map<std::pair<std::string, std::int32_t>, std::set<int>> gt_frames;
    for (const auto& g : gts) gt_frames[{g.sequence_id, g.instance_id}].insert(g.frame_index);

    double sum_v = 0.0;
    double sum_c = 0.0;
    int n_instances = 0;
    for (const auto& [key, rows] : groups) {
      const auto pose_it = gt_poses.find(key.first);
      if (pose_it == gt_poses.end())
        throw InstanceMismatch("evaluate: no ground-truth poses for sequence " + key.first);
      if (config.variance_require_full_presence) {
        const auto ft = gt_frames.find(key);
        if (ft != gt_frames.end() &&
            ft->second.size() != rows.size()) {
          report.warnings.push_back("variance: instance " + std::to_string(key.second) +
                                    " of " + key.first + " missing frames; excluded");
          continue;
        }
      }
      std::vector<OrientedBox3D> boxes;
      std::vector<RigidTransform> poses;
      for (const auto* p : rows) {
        if (p->frame_index < 0 ||
            p->frame_index >= static_cast<int>(pose_it->second.size()))
          throw InstanceMismatch("evaluate: frame index out of range in " + key.first);
        boxes.push_back(p->box);
        poses.push_back(pose_it->second[static_cast<std::size_t>(p->frame_index)]);
      }
      const auto [vv, vc] = variance_metrics(boxes, poses);
      sum_v += vv;
      sum_c += vc;
      ++n_instances;
    }
    if (n_instances > 0) {
      report.var_v = sum_v / n_instances;
      report.var_c = sum_c / n_instances;
      report.variance_available = true;
      report.variance_instances = n_instances;
    }
  } catch (const InstanceMismatch& e) {
    report.variance_available = false;
    report.warnings.push_back(std::string("variance metrics unavailable: ") + e.what());
  }
  return report;
}

}  // namespace det4d
