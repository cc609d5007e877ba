#ifndef CONEFLOW_CHI_PROFILE_HPP
#define CONEFLOW_CHI_PROFILE_HPP

#include "coneflow/common.hpp"

namespace coneflow {

/// Default order of the polynomial transition profile: the transition is the
/// integral of the normalized bump t^P (1-t)^P, giving cutoff kernels with
/// measurable spatial tails ~ d^{-(P+1)}.
inline constexpr int kProfileOrder = 8;

/// exp(-beta/t^nu) continued by zero; C^inf on the line, flat to all orders
/// at 0.  Building block of the infinite-order (Gevrey) step.
inline Real flat_exp(Real t, Real beta = 1.0, Real nu = 1.0) {
  return t > 0.0 ? std::exp(-beta / std::pow(t, nu)) : 0.0;
}

/// Smooth step of infinite order: 0 for t<=0, 1 for t>=1, C^inf monotone in
/// between, all derivatives vanishing at both ends.  Its spatial kernel tails
/// decay like exp(-c sqrt(d)): asymptotically rapid but slow over the finite
/// windows the diagnostics can reach.
inline Real gevrey_step01(Real t, Real beta = 1.0, Real nu = 1.0) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const Real a = flat_exp(t, beta, nu);
  const Real b = flat_exp(1.0 - t, beta, nu);
  return a / (a + b);
}

/// Polynomial smooth step of order P: the integral of the normalized bump
/// t^P (1-t)^P, evaluated through the binomial-CDF identity
///   S_P(t) = sum_{j=P+1}^{2P+1} C(2P+1,j) t^j (1-t)^{2P+1-j},
/// C^P-matched at both ends, monotone, exact plateaus.
inline Real poly_step01(Real t, int order) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const int m = 2 * order + 1;
  Real binom = 1.0;  // C(m, order+1) built incrementally below from C(m,0)=1
  // walk j = 0..order to obtain C(m, order+1) then accumulate the tail sum
  for (int j = 0; j < order + 1; ++j) binom = binom * (m - j) / (j + 1);
  Real sum = 0.0;
  Real c = binom;
  for (int j = order + 1; j <= m; ++j) {
    sum += c * std::pow(t, j) * std::pow(1.0 - t, m - j);
    c = c * (m - j) / (j + 1);
  }
  return sum;
}

/// Default transition used by every angular and radial cutoff.
inline Real smooth_step01(Real t) { return poly_step01(t, kProfileOrder); }

/// Radial cutoff chi: 1 on [0,1], 0 on [2,inf), monotone transition equal to
/// the integral of a normalized bump on (1,2).  The default transition is the
/// order-P polynomial step (P = kProfileOrder); the C^inf Gevrey step is
/// available for comparison runs.  chi(1.5) = 1/2 by symmetry of the bump.
class ChiProfile {
 public:
  ChiProfile() = default;

  static ChiProfile polynomial(int order) {
    ChiProfile p;
    p.order_ = order;
    return p;
  }
  static ChiProfile gevrey(Real beta, Real nu = 1.0) {
    ChiProfile p;
    p.order_ = 0;
    p.beta_ = beta;
    p.nu_ = nu;
    return p;
  }

  Real step(Real t) const {
    return order_ > 0 ? poly_step01(t, order_) : gevrey_step01(t, beta_, nu_);
  }

  Real eval(Real s) const {
    if (s < 0.0) throw std::domain_error("ChiProfile: negative argument s=" + std::to_string(s));
    return 1.0 - step(s - 1.0);
  }

  /// chi_n(xi) = chi(2^{-n} |xi|).
  Real eval_scaled(int n, Real abs_xi) const { return eval(std::ldexp(abs_xi, -n)); }

  int order() const { return order_; }

 private:
  int order_ = kProfileOrder;  // 0 selects the Gevrey step
  Real beta_ = 1.0;
  Real nu_ = 1.0;
};

}  // namespace coneflow

#endif  // CONEFLOW_CHI_PROFILE_HPP
