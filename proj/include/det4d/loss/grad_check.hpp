#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "det4d/loss/params.hpp"

namespace det4d {

struct GradCheckResult {
  std::vector<double> implemented;
  std::vector<double> central;
  std::vector<double> rel_error;
  std::vector<bool> nonsmooth;     // flagged, excluded from the verdict
  double max_rel_error = 0.0;      // over parameters not flagged
  int flagged_count = 0;

  bool passes(double tol) const { return max_rel_error < tol; }
};

/// Central-difference check of an implemented gradient.
///
/// `f` evaluates the loss at a parameter vector. A parameter is flagged as
/// non-smooth (reported, never failed) when the one-sided slopes probed at
/// 10h disagree — the signature of an abs/min/max tie within the probe
/// radius — or when the optional `tie_gap` says the evaluation point sits
/// within the probe radius of a known tie.
inline GradCheckResult grad_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> gradient, std::span<const double> x,
                                  double h = 1e-5,
                                  const std::function<double()>& tie_gap = nullptr) {
  if (gradient.size() != x.size()) throw DimMismatch("grad_check: gradient size != params");
  GradCheckResult r;
  r.implemented.assign(gradient.begin(), gradient.end());
  r.central.resize(x.size());
  r.rel_error.resize(x.size());
  r.nonsmooth.assign(x.size(), false);

  const double f0 = f(x);
  std::vector<double> probe(x.begin(), x.end());
  const double kink_step = 10.0 * h;
  const bool near_tie = tie_gap && tie_gap() < 4.0 * kink_step;

  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    probe[j] = xj + h;
    const double fp = f(probe);
    probe[j] = xj - h;
    const double fm = f(probe);
    probe[j] = xj + kink_step;
    const double fp10 = f(probe);
    probe[j] = xj - kink_step;
    const double fm10 = f(probe);
    probe[j] = xj;

    r.central[j] = (fp - fm) / (2.0 * h);
    const double d_plus = (fp10 - f0) / kink_step;
    const double d_minus = (f0 - fm10) / kink_step;
    const double disagreement = std::abs(d_plus - d_minus);
    if (near_tie || disagreement > 0.05 * std::max({1.0, std::abs(d_plus), std::abs(d_minus)}))
      r.nonsmooth[j] = true;

    r.rel_error[j] = std::abs(gradient[j] - r.central[j]) /
                     std::max({1.0, std::abs(gradient[j]), std::abs(r.central[j])});
    if (r.nonsmooth[j])
      ++r.flagged_count;
    else
      r.max_rel_error = std::max(r.max_rel_error, r.rel_error[j]);
  }
  return r;
}

}  // namespace det4d
