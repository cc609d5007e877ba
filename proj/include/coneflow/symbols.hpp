#ifndef CONEFLOW_SYMBOLS_HPP
#define CONEFLOW_SYMBOLS_HPP

#include "coneflow/chi_profile.hpp"
#include "coneflow/cone_system.hpp"
#include "coneflow/common.hpp"

namespace coneflow {

enum class ShellKind { psi, chi, psi_tilde };

/// Radial shell factors.
///   chi_n(xi)      = chi(2^{-n}|xi|)
///   psi_n          = chi_n - chi_{n-1}   (psi_0 = chi_0)
///   psi~_n         = chi(2^{-n-1}|xi|) - chi(2^{-n+2}|xi|) for n >= 1,
///                    chi(2^{-1}|xi|) for n = 0.
/// supp(psi_n) lies in {2^{n-1} <= |xi| <= 2^{n+1}} and psi~_n = 1 there.
inline Real eval_shell(const ChiProfile& profile, ShellKind kind, int n, const Vec& xi) {
  require(n >= 0, "eval_shell: shell index must be >= 0");
  const Real r = xi.norm();
  switch (kind) {
    case ShellKind::chi:
      return profile.eval_scaled(n, r);
    case ShellKind::psi:
      if (n == 0) return profile.eval_scaled(0, r);
      return profile.eval_scaled(n, r) - profile.eval_scaled(n - 1, r);
    case ShellKind::psi_tilde:
      if (n == 0) return profile.eval_scaled(1, r);
      return profile.eval_scaled(n + 1, r) - profile.eval(std::ldexp(r, -n + 2));
  }
  return 0.0;
}

/// psi_{Theta,n,sigma}: the (shell, cone) pieces of the dyadic-cone partition
/// of unity, or their enlarged dominating versions.
///   n >= 1:  psi_n(xi) phi_sigma(xi/|xi|)        (enlarged: psi~_n phi~_sigma)
///   n  = 0:  chi_0(xi)/2                          (enlarged: chi(2^{-1}|xi|))
inline Real eval_directional(const ConeSystem& theta, const ChiProfile& profile, int n,
                             Sign sigma, const Vec& xi, bool enlarged = false) {
  require(n >= 0, "eval_directional: shell index must be >= 0");
  if (n == 0) {
    if (enlarged) return profile.eval_scaled(1, xi.norm());
    return 0.5 * profile.eval_scaled(0, xi.norm());
  }
  if (enlarged) {
    const Real shell = eval_shell(profile, ShellKind::psi_tilde, n, xi);
    if (shell == 0.0) return 0.0;
    return shell * theta.phi_tilde(sigma, xi);
  }
  const Real shell = eval_shell(profile, ShellKind::psi, n, xi);
  if (shell == 0.0) return 0.0;
  return shell * theta.phi(sigma, xi);
}

/// Appendix weight symbols Psi_{Theta,p,sigma}(xi) = (1+|xi|^2)^{p/2}
/// phi_sigma(xi/|xi|); at xi = 0 the angular factor takes the value 1/2.
inline Real eval_weight_symbol(const ConeSystem& theta, Real exponent, Sign sigma,
                               const Vec& xi) {
  const Real w = std::pow(1.0 + xi.squaredNorm(), exponent / 2.0);
  return w * theta.phi(sigma, xi);
}

/// Symbol functor bundling a cone system and a radial profile; evaluates any
/// of the scalar symbols at a frequency.  Cheap to copy.
struct DirectionalSymbol {
  const ConeSystem* theta;
  const ChiProfile* profile;
  GammaIndex index;
  bool enlarged = false;

  Real operator()(const Vec& xi) const {
    return eval_directional(*theta, *profile, index.n, index.sigma, xi, enlarged);
  }
};

}  // namespace coneflow

#endif  // CONEFLOW_SYMBOLS_HPP
