#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace det4d {

/// Forward-mode dual number carrying a value and a runtime-sized vector of
/// partial derivatives. Constants carry an empty derivative vector, which all
/// operations treat as zero. Comparisons act on the value part, so branching
/// code (clipping, min/max selection) follows the same path a plain double
/// evaluation would take.
class Dual {
 public:
  Dual() = default;
  Dual(double value) : v_(value) {}  // NOLINT: implicit constants are intended
  Dual(double value, std::vector<double> deriv) : v_(value), d_(std::move(deriv)) {}

  /// Seeds the j-th of n independent variables.
  static Dual variable(double value, std::size_t j, std::size_t n) {
    std::vector<double> d(n, 0.0);
    d[j] = 1.0;
    return Dual(value, std::move(d));
  }

  double value() const { return v_; }
  const std::vector<double>& deriv() const { return d_; }

  /// Partial with respect to variable j (zero when untracked).
  double partial(std::size_t j) const { return j < d_.size() ? d_[j] : 0.0; }

  Dual operator-() const {
    Dual r(-v_, d_);
    for (double& g : r.d_) g = -g;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v_ += o.v_;
    accumulate(d_, o.d_, 1.0);
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v_ -= o.v_;
    accumulate(d_, o.d_, -1.0);
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }

  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v_ * b.v_);
    r.d_ = scaled(a.d_, b.v_);
    accumulate(r.d_, b.d_, a.v_);
    return r;
  }

  friend Dual operator/(const Dual& a, const Dual& b) {
    // Value uses the plain quotient so dual evaluation reproduces the double
    // code path bit for bit.
    Dual r(a.v_ / b.v_);
    const double inv = 1.0 / b.v_;
    r.d_ = scaled(a.d_, inv);
    accumulate(r.d_, b.d_, -a.v_ * inv * inv);
    return r;
  }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v_ < b.v_; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.v_ >= b.v_; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Dual& a, const Dual& b) { return a.v_ != b.v_; }

  /// Chain rule for a unary map with value `f` and local slope `dfdx`.
  Dual chain(double f, double dfdx) const { return Dual(f, scaled(d_, dfdx)); }

 private:
  static std::vector<double> scaled(const std::vector<double>& d, double s) {
    std::vector<double> r(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) r[i] = d[i] * s;
    return r;
  }

  // dst += scale * src, growing dst as needed.
  static void accumulate(std::vector<double>& dst, const std::vector<double>& src, double scale) {
    if (src.size() > dst.size()) dst.resize(src.size(), 0.0);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
  }

  double v_ = 0.0;
  std::vector<double> d_;
};

inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return x.chain(s, 0.5 / s);
}

inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return x.chain(e, e);
}

inline Dual log(const Dual& x) { return x.chain(std::log(x.value()), 1.0 / x.value()); }

inline Dual log1p(const Dual& x) {
  return x.chain(std::log1p(x.value()), 1.0 / (1.0 + x.value()));
}

inline Dual sin(const Dual& x) { return x.chain(std::sin(x.value()), std::cos(x.value())); }

inline Dual cos(const Dual& x) { return x.chain(std::cos(x.value()), -std::sin(x.value())); }

/// Subgradient convention: slope +1 at exactly zero.
inline Dual abs(const Dual& x) {
  return x.value() < 0.0 ? -x : x;
}

inline Dual min(const Dual& a, const Dual& b) { return a.value() <= b.value() ? a : b; }
inline Dual max(const Dual& a, const Dual& b) { return a.value() >= b.value() ? a : b; }

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value(); }

}  // namespace det4d
