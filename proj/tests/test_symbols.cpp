#include "coneflow/symbols.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace coneflow;
using Catch::Approx;

namespace {

Vec vec2(Real x, Real y) {
  Vec v(2);
  v << x, y;
  return v;
}

// Quadrature oracle for the transition of chi: integrate the normalized bump
// t^P (1-t)^P with Simpson's rule and compare against the closed form.
Real step_derivative(Real t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const int p = kProfileOrder;
  const Real log_beta_fn = 2.0 * std::lgamma(p + 1.0) - std::lgamma(2.0 * p + 2.0);
  return std::pow(t * (1.0 - t), p) / std::exp(log_beta_fn);
}

Real simpson(Real a, Real b, int n) {
  Real s = step_derivative(a) + step_derivative(b);
  const Real h = (b - a) / n;
  for (int i = 1; i < n; ++i) s += step_derivative(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("chi endpoint plateaus are exact") {
  ChiProfile chi;
  CHECK(chi.eval(0.0) == 1.0);
  CHECK(chi.eval(0.5) == 1.0);
  CHECK(chi.eval(1.0) == 1.0);
  CHECK(chi.eval(2.0) == 0.0);
  CHECK(chi.eval(3.0) == 0.0);
  CHECK_THROWS_AS(chi.eval(-0.1), std::domain_error);
}

TEST_CASE("chi transition matches the bump-integral oracle") {
  ChiProfile chi;
  // midpoint by symmetry of the bump
  CHECK(chi.eval(1.5) == Approx(0.5).margin(1e-15));
  for (Real s : {1.2, 1.3, 1.75, 1.9}) {
    const Real viaquad = 1.0 - simpson(0.0, s - 1.0, 4000);
    CHECK(chi.eval(s) == Approx(viaquad).margin(1e-9));
    CHECK(chi.eval(s) > 0.0);
    CHECK(chi.eval(s) < 1.0);
  }
}

TEST_CASE("the C^inf Gevrey profile satisfies the same constraints") {
  const ChiProfile chi = ChiProfile::gevrey(1.0);
  CHECK(chi.eval(0.7) == 1.0);
  CHECK(chi.eval(2.2) == 0.0);
  CHECK(chi.eval(1.5) == Approx(0.5).margin(1e-15));
  Real prev = 1.0;
  for (int i = 0; i <= 600; ++i) {
    const Real v = chi.eval(3.0 * i / 600);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("chi is monotone with values in [0,1]") {
  ChiProfile chi;
  Real prev = 1.0;
  for (int i = 0; i <= 3000; ++i) {
    const Real s = 3.0 * i / 3000;
    const Real v = chi.eval(s);
    CHECK(v <= prev + 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("chi finite differences of order 4 are bounded uniformly in resolution") {
  ChiProfile chi;
  auto max_fourth_diff = [&](Real h) {
    Real m = 0.0;
    for (Real s = 0.0; s + 4 * h <= 3.0; s += h) {
      const Real d4 = chi.eval(s) - 4 * chi.eval(s + h) + 6 * chi.eval(s + 2 * h) -
                      4 * chi.eval(s + 3 * h) + chi.eval(s + 4 * h);
      m = std::max(m, std::fabs(d4) / (h * h * h * h));
    }
    return m;
  };
  const Real coarse = max_fourth_diff(1.0 / 128);
  const Real fine = max_fourth_diff(1.0 / 256);
  // both approximate sup |chi''''| (~2.3e3 for this profile); uniformity means
  // refinement does not blow up
  CHECK(fine < 4000.0);
  CHECK(coarse < 4000.0);
  CHECK(fine / coarse < 1.5);
}

TEST_CASE("shell factors: forced values and supports") {
  ChiProfile chi;
  // psi_1 at |xi| = 2: chi(1) - chi(2) = 1
  CHECK(eval_shell(chi, ShellKind::psi, 1, vec2(2.0, 0.0)) == Approx(1.0).margin(1e-15));
  // psi_3 vanishes outside 4 <= |xi| <= 16
  CHECK(eval_shell(chi, ShellKind::psi, 3, vec2(20.0, 0.0)) == 0.0);
  CHECK(eval_shell(chi, ShellKind::psi, 3, vec2(0.0, 3.0)) == 0.0);
  // support scan for several shells
  for (int n = 1; n <= 6; ++n) {
    for (Real r = 0.1; r < 200.0; r *= 1.07) {
      const Real v = eval_shell(chi, ShellKind::psi, n, vec2(r, 0.0));
      if (v != 0.0) {
        CHECK(r >= std::ldexp(1.0, n - 1) - 1e-12);
        CHECK(r <= std::ldexp(1.0, n + 1) + 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(eval_shell(chi, ShellKind::psi, -1, vec2(1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("psi_n is a rescaled psi_1") {
  ChiProfile chi;
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.integer(8));
    const Vec xi = vec2(rng.uniform(-300.0, 300.0), rng.uniform(-300.0, 300.0));
    const Vec scaled = std::ldexp(1.0, -n + 1) * xi;
    CHECK(eval_shell(chi, ShellKind::psi, n, xi) ==
          Approx(eval_shell(chi, ShellKind::psi, 1, scaled)).margin(1e-12));
  }
}

TEST_CASE("enlarged shells dominate the plain ones") {
  ChiProfile chi;
  // psi~_2 = 1 wherever psi_2 > 0, scanned over a frequency lattice patch
  for (int i = -40; i <= 40; ++i) {
    for (int j = -40; j <= 40; ++j) {
      const Vec xi = vec2(i, j);
      if (eval_shell(chi, ShellKind::psi, 2, xi) > 0.0)
        CHECK(eval_shell(chi, ShellKind::psi_tilde, 2, xi) == Approx(1.0).margin(1e-15));
    }
  }
  // n = 0 uses chi(2^{-1}|xi|)
  CHECK(eval_shell(chi, ShellKind::psi_tilde, 0, vec2(1.5, 0.0)) == 1.0);
  CHECK(eval_shell(chi, ShellKind::psi_tilde, 0, vec2(5.0, 0.0)) == 0.0);
}

TEST_CASE("cone system: transversality enforced, phi_+ + phi_- = 1") {
  CHECK_THROWS(ConeSystem::axis_aligned(1.0, 1.0));  // cones overlap
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  CHECK(theta.dimension() == 2);
  for (const Vec& v : unit_sphere_samples(2, 257)) {
    const Real fp = theta.phi_plus(v);
    CHECK(fp >= 0.0);
    CHECK(fp <= 1.0);
    CHECK(theta.phi_minus(v) == Approx(1.0 - fp).margin(1e-15));
    if (theta.contains(Sign::plus, v)) CHECK(fp == 1.0);
    if (theta.contains(Sign::minus, v)) CHECK(fp == 0.0);
    // enlarged cutoffs dominate: phi~_tau = 1 wherever phi_tau != 0
    for (Sign tau : {Sign::plus, Sign::minus})
      if (theta.phi(tau, v) != 0.0) CHECK(theta.phi_tilde(tau, v) == 1.0);
  }
}

TEST_CASE("directional symbols: n=0 halves, core values, partition of unity") {
  ChiProfile chi;
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);

  CHECK(eval_directional(theta, chi, 0, Sign::plus, vec2(0.0, 0.0)) == 0.5);
  CHECK(eval_directional(theta, chi, 0, Sign::minus, vec2(0.0, 0.0)) == 0.5);

  // n=2, sigma=+, xi = 4 e1 (core of C+): psi_2 = 1 and phi_+ = 1
  CHECK(eval_directional(theta, chi, 2, Sign::plus, vec2(4.0, 0.0)) == Approx(1.0).margin(1e-15));
  CHECK(eval_directional(theta, chi, 2, Sign::minus, vec2(4.0, 0.0)) == 0.0);

  // partition of unity at assorted lattice points
  for (const Vec& xi : {vec2(3.0, 1.0), vec2(0.0, 0.0), vec2(-17.0, 5.0), vec2(1.0, 1.0),
                        vec2(120.0, -33.0)}) {
    Real sum = 0.0;
    for (int n = 0; n <= 12; ++n)
      for (Sign s : {Sign::plus, Sign::minus}) sum += eval_directional(theta, chi, n, s, xi);
    CHECK(sum == Approx(1.0).margin(1e-12));
  }

  // enlarged n=0 term is the full chi(|xi|/2)
  CHECK(eval_directional(theta, chi, 0, Sign::plus, vec2(1.9, 0.0), true) == 1.0);
}

TEST_CASE("enlarged directional symbols dominate the plain ones") {
  ChiProfile chi;
  const ConeSystem theta = ConeSystem::axis_aligned(0.4, 0.6);
  Rng rng(11);
  for (int trial = 0; trial < 4000; ++trial) {
    const Vec xi = vec2(rng.uniform(-64.0, 64.0), rng.uniform(-64.0, 64.0));
    const int n = static_cast<int>(rng.integer(7));
    for (Sign s : {Sign::plus, Sign::minus}) {
      if (eval_directional(theta, chi, n, s, xi) != 0.0)
        CHECK(eval_directional(theta, chi, n, s, xi, true) == Approx(1.0).margin(1e-15));
    }
  }
}

TEST_CASE("refinement relation on cone systems") {
  const ConeSystem theta = ConeSystem::axis_aligned(0.4, 0.4);
  // minus aperture strictly larger than pi/2 - 0.4 with the same axes
  const ConeSystem finer = ConeSystem::axis_aligned(0.3, kPi / 2.0 - 0.4 + 0.05);
  CHECK(refines(finer, theta));
  // a combination never refines itself when the cones do not cover the plane
  CHECK_FALSE(refines(theta, theta));
  // swapped axes: C'_- around e1 cannot absorb the complement of C+
  const ConeSystem swapped = theta.swapped();
  CHECK_FALSE(refines(swapped, theta));
  // dimension mismatch rejected
  Mat p3(3, 1), m3(3, 1);
  p3 << 1, 0, 0;
  m3 << 0, 0, 1;
  const ConeSystem theta3(p3, 0.4, m3, 0.4);
  CHECK_THROWS_AS(refines(theta3, theta), std::invalid_argument);
}

TEST_CASE("weight symbols") {
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  CHECK(eval_weight_symbol(theta, 0.0, Sign::plus, vec2(2.0, 0.0)) == Approx(1.0));
  CHECK(eval_weight_symbol(theta, 2.0, Sign::plus, vec2(3.0, 0.0)) == Approx(10.0));
  CHECK(eval_weight_symbol(theta, -2.0, Sign::minus, vec2(3.0, 0.0)) == 0.0);
  // xi = 0 convention: angular factor 1/2
  CHECK(eval_weight_symbol(theta, 2.0, Sign::plus, vec2(0.0, 0.0)) == Approx(0.5));
  CHECK(eval_weight_symbol(theta, -1.0, Sign::minus, vec2(0.0, 0.0)) == Approx(0.5));
}
