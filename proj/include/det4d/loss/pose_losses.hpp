#pragma once

#include "det4d/loss/params.hpp"

namespace det4d {

/// L1 applied separately to translation, sign-canonicalized unit quaternions,
/// and field of view, then summed. The prediction quaternion is normalized
/// before comparison so the loss is well defined slightly off the unit
/// sphere (finite-difference probes land there).
template <class S>
S pose_loss(const PoseParamsT<S>& pred, const PoseParams& gt) {
  using std::abs;
  const S t = abs(pred.translation.x - gt.translation.x) +
              abs(pred.translation.y - gt.translation.y) +
              abs(pred.translation.z - gt.translation.z);
  const Quaternion<S> qp = pred.rotation.normalized().canonical();
  const Quaterniond qg = gt.rotation.normalized().canonical();
  const S r = abs(qp.w - qg.w) + abs(qp.x - qg.x) + abs(qp.y - qg.y) + abs(qp.z - qg.z);
  const S f = abs(pred.fov - gt.fov);
  return t + r + f;
}

inline LossValue eval_pose_loss(const PoseParams& pred, const PoseParams& gt) {
  return loss_detail::finish(pose_loss(loss_detail::seed_pose(pred, 0, 8), gt), 8);
}

}  // namespace det4d
