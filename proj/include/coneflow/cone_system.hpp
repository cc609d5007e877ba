#ifndef CONEFLOW_CONE_SYSTEM_HPP
#define CONEFLOW_CONE_SYSTEM_HPP

#include "coneflow/chi_profile.hpp"
#include "coneflow/common.hpp"

namespace coneflow {

/// Unit directions used for sampled cone checks. In 2D these are uniformly
/// spaced angles; in higher dimension a deterministic spiral/random mix.
inline std::vector<Vec> unit_sphere_samples(int d, int count) {
  std::vector<Vec> out;
  out.reserve(count);
  if (d == 1) {
    Vec v(1);
    v[0] = 1.0;
    out.push_back(v);
    v[0] = -1.0;
    out.push_back(v);
    return out;
  }
  if (d == 2) {
    for (int i = 0; i < count; ++i) {
      const Real a = kTwoPi * i / count;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      out.push_back(v);
    }
    return out;
  }
  if (d == 3) {
    // Fibonacci sphere
    const Real golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < count; ++i) {
      const Real z = 1.0 - 2.0 * (i + 0.5) / count;
      const Real r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Real a = kTwoPi * i / golden;
      Vec v(3);
      v << r * std::cos(a), r * std::sin(a), z;
      out.push_back(v);
    }
    return out;
  }
  Rng rng(12345);
  for (int i = 0; i < count; ++i) {
    Vec v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.gaussian();
    out.push_back(v.normalized());
  }
  return out;
}

/// A combination Theta = (C+, C-, phi+, phi-): two transversal closed cones
/// C_sigma = { xi : angle(xi, span(axes_sigma)) <= aperture_sigma } together
/// with the smooth angular cutoffs phi+ (1 on C+, 0 on C-) and phi- = 1 - phi+.
///
/// The enlarged cutoffs phi~_tau of the Lasota-Yorke section transition inside
/// the opposite cone, between its boundary and the shrunken core cone
/// C~_sigma (aperture scaled by enlarged_shrink).
class ConeSystem {
 public:
  ConeSystem() = default;

  ConeSystem(Mat plus_axes, Real plus_aperture, Mat minus_axes, Real minus_aperture,
             Real enlarged_shrink = 0.9)
      : plus_axes_(orthonormalized(plus_axes)),
        minus_axes_(orthonormalized(minus_axes)),
        plus_aperture_(plus_aperture),
        minus_aperture_(minus_aperture),
        enlarged_shrink_(enlarged_shrink) {
    require(plus_axes_.rows() == minus_axes_.rows(), "ConeSystem: axis dimension mismatch");
    require(plus_aperture_ > 0.0 && minus_aperture_ > 0.0,
            "ConeSystem: apertures must be positive");
    require(enlarged_shrink_ > 0.0 && enlarged_shrink_ < 1.0,
            "ConeSystem: enlarged_shrink must lie in (0,1)");
    check_runtime(transversal(), "ConeSystem: cones C+ and C- intersect");
  }

  /// 2D system from core angles (radians, measured from the x-axis).
  static ConeSystem planar(Real plus_angle, Real plus_aperture, Real minus_angle,
                           Real minus_aperture, Real enlarged_shrink = 0.9) {
    Mat p(2, 1), m(2, 1);
    p << std::cos(plus_angle), std::sin(plus_angle);
    m << std::cos(minus_angle), std::sin(minus_angle);
    return ConeSystem(p, plus_aperture, m, minus_aperture, enlarged_shrink);
  }

  /// Axis-aligned 2D system: C+ around e1, C- around e2.
  static ConeSystem axis_aligned(Real plus_aperture, Real minus_aperture,
                                 Real enlarged_shrink = 0.9) {
    return planar(0.0, plus_aperture, kPi / 2.0, minus_aperture, enlarged_shrink);
  }

  int dimension() const { return static_cast<int>(plus_axes_.rows()); }
  const Mat& plus_axes() const { return plus_axes_; }
  const Mat& minus_axes() const { return minus_axes_; }
  Real plus_aperture() const { return plus_aperture_; }
  Real minus_aperture() const { return minus_aperture_; }
  Real enlarged_shrink() const { return enlarged_shrink_; }

  Real aperture(Sign s) const { return s == Sign::plus ? plus_aperture_ : minus_aperture_; }

  /// Angle between xi and the core subspace of the sigma cone, in [0, pi/2].
  Real angle_to_core(Sign s, const Vec& xi) const {
    const Mat& axes = (s == Sign::plus) ? plus_axes_ : minus_axes_;
    const Real norm = xi.norm();
    if (norm == 0.0) return 0.0;
    const Vec unit = xi / norm;
    const Vec proj = axes * (axes.transpose() * unit);
    const Real c = proj.norm();
    const Real sn = (unit - proj).norm();
    return std::atan2(sn, c);
  }

  bool contains(Sign s, const Vec& xi) const {
    if (xi.norm() == 0.0) return true;
    return angle_to_core(s, xi) <= aperture(s) + 1e-15;
  }
  bool interior_contains(Sign s, const Vec& xi) const {
    if (xi.norm() == 0.0) return false;
    return angle_to_core(s, xi) < aperture(s) - 1e-15;
  }

  /// phi_+ evaluated on directions; phi_-(xi) = 1 - phi_+(xi) identically.
  /// At xi = 0 returns 1/2 (symmetric convention, only reachable through the
  /// weight symbols).
  Real phi_plus(const Vec& xi) const {
    if (xi.norm() == 0.0) return 0.5;
    const Real ap = angle_to_core(Sign::plus, xi);
    if (ap <= plus_aperture_) return 1.0;
    const Real am = angle_to_core(Sign::minus, xi);
    if (am <= minus_aperture_) return 0.0;
    const Real t = (ap - plus_aperture_) / ((ap - plus_aperture_) + (am - minus_aperture_));
    return 1.0 - smooth_step01(t);
  }
  Real phi_minus(const Vec& xi) const { return 1.0 - phi_plus(xi); }
  Real phi(Sign s, const Vec& xi) const {
    return s == Sign::plus ? phi_plus(xi) : phi_minus(xi);
  }

  /// Enlarged cutoffs (Lasota-Yorke section): phi~_+ is 1 outside C-, 0 on the
  /// shrunken cone C~_-, and transitions in between; phi~_- mirrors this with
  /// C+ and C~_+.  Note phi~_+ + phi~_- is not a partition; both equal 1 on
  /// the region between the cones.  phi~_tau = 1 wherever phi_tau != 0.
  Real phi_tilde(Sign tau, const Vec& xi) const {
    if (xi.norm() == 0.0) return 1.0;
    const Sign opp = other(tau);
    const Real a = aperture(opp);
    const Real a_shrunk = enlarged_shrink_ * a;
    const Real ang = angle_to_core(opp, xi);
    if (ang >= a) return 1.0;
    if (ang <= a_shrunk) return 0.0;
    return smooth_step01((ang - a_shrunk) / (a - a_shrunk));
  }

  /// Membership in the shrunken core cone C~_sigma (aperture * shrink).
  bool tilde_contains(Sign s, const Vec& xi) const {
    if (xi.norm() == 0.0) return true;
    return angle_to_core(s, xi) <= enlarged_shrink_ * aperture(s) + 1e-15;
  }

  ConeSystem with_apertures(Real plus_aperture, Real minus_aperture) const {
    return ConeSystem(plus_axes_, plus_aperture, minus_axes_, minus_aperture, enlarged_shrink_);
  }
  ConeSystem with_shrink(Real shrink) const {
    return ConeSystem(plus_axes_, plus_aperture_, minus_axes_, minus_aperture_, shrink);
  }
  /// Swap the roles of the two cones (C+ <-> C-), keeping apertures attached
  /// to their axes.
  ConeSystem swapped() const {
    return ConeSystem(minus_axes_, minus_aperture_, plus_axes_, plus_aperture_,
                      enlarged_shrink_);
  }

 private:
  static Mat orthonormalized(Mat axes) {
    require(axes.cols() >= 1, "ConeSystem: cone core needs at least one axis");
    Eigen::HouseholderQR<Mat> qr(axes);
    Mat q = qr.householderQ() * Mat::Identity(axes.rows(), axes.cols());
    // keep the first axis pointing the way it was given
    if (axes.col(0).dot(q.col(0)) < 0.0) q.col(0) *= -1.0;
    return q;
  }

  bool transversal() const {
    for (const Vec& v : unit_sphere_samples(dimension(), 2048)) {
      if (angle_to_core(Sign::plus, v) <= plus_aperture_ &&
          angle_to_core(Sign::minus, v) <= minus_aperture_)
        return false;
    }
    return true;
  }

  Mat plus_axes_, minus_axes_;
  Real plus_aperture_ = 0.0, minus_aperture_ = 0.0;
  Real enlarged_shrink_ = 0.9;
};

/// Theta' < Theta: closure(R^d \ C+) contained in interior(C'_-) union {0}.
/// Checked by dense sphere sampling; when the minus core of Theta' and the
/// plus core of Theta span complementary orthogonal subspaces the aperture
/// arithmetic closure(angle_+ >= a_+) => angle'_- < a'_- is exact and reads
/// a'_- > pi/2 - a_+ in 2D.
inline bool refines(const ConeSystem& theta_prime, const ConeSystem& theta,
                    int samples = 8192) {
  require(theta_prime.dimension() == theta.dimension(), "refines: dimension mismatch");
  for (const Vec& v : unit_sphere_samples(theta.dimension(), samples)) {
    const bool outside_plus = !theta.interior_contains(Sign::plus, v);
    if (outside_plus && !theta_prime.interior_contains(Sign::minus, v)) return false;
  }
  return true;
}

}  // namespace coneflow

#endif  // CONEFLOW_CONE_SYSTEM_HPP
