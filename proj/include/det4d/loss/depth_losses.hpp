#pragma once

#include <span>
#include <vector>

#include "det4d/geometry/raster.hpp"
#include "det4d/loss/params.hpp"

namespace det4d {

/// Scale-invariant logarithmic depth loss over pixels with valid ground
/// truth: g = log(pred) - log(gt), value = sqrt(mean g^2 - lambda (mean g)^2).
/// lambda = 1 is fully scale-invariant. Ground-truth sentinel pixels are
/// skipped; non-positive predictions on valid pixels are an error.
template <class S>
S silog(std::span<const S> pred, std::span<const double> gt, double lambda = 1.0) {
  if (pred.size() != gt.size()) throw DimMismatch("silog: size mismatch");
  using std::log;
  using std::max;
  using std::sqrt;
  S sum_g(0);
  S sum_g2(0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!(gt[i] > 0.0)) continue;
    if (!(value_of(pred[i]) > 0.0))
      throw NonPositiveDepth("silog: non-positive predicted depth at valid pixel " +
                             std::to_string(i));
    const S g = log(pred[i]) - std::log(gt[i]);
    sum_g += g;
    sum_g2 += g * g;
    ++n;
  }
  if (n == 0) throw EmptySet("silog: no valid ground-truth pixels");
  const S inv_n = S(1.0 / static_cast<double>(n));
  const S mean_g = sum_g * inv_n;
  // Clamp the tiny negative residue rounding can leave at lambda = 1.
  const S arg = max(S(0), sum_g2 * inv_n - S(lambda) * mean_g * mean_g);
  return sqrt(arg);
}

inline double silog(const DepthMap& pred, const DepthMap& gt, double lambda = 1.0) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw DimMismatch("silog: raster size mismatch");
  std::vector<double> p(pred.data().begin(), pred.data().end());
  std::vector<double> g(gt.data().begin(), gt.data().end());
  return silog<double>(p, g, lambda);
}

/// Gradient with respect to every predicted depth value.
inline LossValue eval_silog(std::span<const double> pred, std::span<const double> gt,
                            double lambda = 1.0) {
  std::vector<Dual> p;
  p.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i)
    p.push_back(Dual::variable(pred[i], i, pred.size()));
  return loss_detail::finish(silog<Dual>(p, gt, lambda), pred.size());
}

}  // namespace det4d
