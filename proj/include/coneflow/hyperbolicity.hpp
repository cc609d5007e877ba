#ifndef CONEFLOW_HYPERBOLICITY_HPP
#define CONEFLOW_HYPERBOLICITY_HPP

#include "coneflow/cone_system.hpp"
#include "coneflow/map_model.hpp"

#include <map>
#include <optional>

namespace coneflow {

/// DT^m_x as the ordered product DT_{T^{m-1}x} ... DT_x.
inline Mat iterate_derivative(const MapModel& map, Vec x, int m, bool transpose = false) {
  require(m >= 0, "iterate_derivative: m must be >= 0");
  Mat d = Mat::Identity(map.dimension(), map.dimension());
  for (int k = 0; k < m; ++k) {
    d = map.derivative(x) * d;
    x = map.apply(x);
  }
  return transpose ? d.transpose().eval() : d;
}

namespace detail {

/// Pull a direction back through the inverse derivative cocycle along the
/// forward orbit of x; converges to the stable line at rate (contraction *
/// expansion)^{-iters}.
inline Vec stable_direction_seeded(const MapModel& map, const Vec& x, int iters, Vec seed) {
  std::vector<Mat> jac;
  jac.reserve(iters);
  Vec y = x;
  for (int k = 0; k < iters; ++k) {
    jac.push_back(map.derivative(y));
    y = map.apply(y);
  }
  Vec w = seed.normalized();
  for (int k = iters - 1; k >= 0; --k) w = (jac[k].inverse() * w).normalized();
  return w;
}

/// Push a direction forward along the backward orbit ending at x.
inline Vec unstable_direction_seeded(const MapModel& map, const Vec& x, int iters, Vec seed) {
  std::vector<Vec> orbit(iters);
  Vec y = x;
  for (int k = 0; k < iters; ++k) {
    y = map.apply_inverse(y);
    orbit[iters - 1 - k] = y;  // orbit[0] = T^{-iters} x ... orbit[iters-1] = T^{-1} x
  }
  Vec w = seed.normalized();
  for (int k = 0; k < iters; ++k) w = (map.derivative(orbit[k]) * w).normalized();
  return w;
}

inline Real line_angle(const Vec& a, const Vec& b) {
  const Real c = std::fabs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, c));
}

}  // namespace detail

/// Unit stable/unstable directions at one sample point with the invariance
/// residuals angle(DT_x E(x), E(T x)).
struct SplittingPoint {
  Vec x;
  Vec stable;
  Vec unstable;
  Real residual_stable = 0.0;
  Real residual_unstable = 0.0;
};

/// Sampled hyperbolic splitting along orbit points.  Directions at points
/// outside the sample are recomputed on demand with the stored solver
/// settings.
class SplittingSample {
 public:
  SplittingSample(const MapModel& map, int iterations, Real tol)
      : map_(&map), iterations_(iterations), tol_(tol) {}

  const MapModel& map() const { return *map_; }
  const std::vector<SplittingPoint>& points() const { return points_; }
  int iterations() const { return iterations_; }

  void add(SplittingPoint p) { points_.push_back(std::move(p)); }

  bool contains(const Vec& x, Real tol = 1e-9) const {
    for (const auto& p : points_)
      if ((p.x - x).norm() <= tol) return true;
    return false;
  }

  /// Directions at an arbitrary point (cached).
  const SplittingPoint& at(const Vec& x) const {
    for (const auto& p : points_)
      if ((p.x - x).norm() <= 1e-9) return p;
    const auto key = quantize(x);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    SplittingPoint p = solve_point(*map_, x, iterations_, tol_);
    return cache_.emplace(key, std::move(p)).first->second;
  }

  static SplittingPoint solve_point(const MapModel& map, const Vec& x, int iterations,
                                    Real tol) {
    const int d = map.dimension();
    require(d == 2, "SplittingSample: 1D stable/unstable bundles only (d = 2)");
    Vec seed1(2), seed2(2);
    seed1 << 1.0, 0.37;
    seed2 << -0.41, 1.0;
    SplittingPoint p;
    p.x = x;
    const Vec s1 = detail::stable_direction_seeded(map, x, iterations, seed1);
    const Vec s2 = detail::stable_direction_seeded(map, x, iterations, seed2);
    const Vec u1 = detail::unstable_direction_seeded(map, x, iterations, seed1);
    const Vec u2 = detail::unstable_direction_seeded(map, x, iterations, seed2);
    // two independent seeds must agree on the limit; for non-hyperbolic maps
    // (identity, rotations) they stay apart
    const Real rs = detail::line_angle(s1, s2);
    const Real ru = detail::line_angle(u1, u2);
    check_runtime(rs <= tol && ru <= tol,
                  "estimate_splitting: no hyperbolic splitting (seed disagreement " +
                      std::to_string(std::max(rs, ru)) + ")");
    p.stable = s1;
    p.unstable = u1;
    check_runtime(detail::line_angle(p.stable, p.unstable) > 1e-6,
                  "estimate_splitting: stable and unstable directions collapse");
    return p;
  }

 private:
  static std::array<std::int64_t, kMaxDim> quantize(const Vec& x) {
    std::array<std::int64_t, kMaxDim> key{};
    for (int a = 0; a < x.size(); ++a)
      key[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(std::llround(x[a] * 1e10));
    return key;
  }

  const MapModel* map_;
  int iterations_;
  Real tol_;
  std::vector<SplittingPoint> points_;
  mutable std::map<std::array<std::int64_t, kMaxDim>, SplittingPoint> cache_;
};

/// Power-iteration estimate of the invariant splitting over the given points.
/// E^u comes from pushing directions along a backward orbit, E^s from pulling
/// them back along the forward orbit; two seeds cross-validate convergence.
inline SplittingSample estimate_splitting(const MapModel& map, const std::vector<Vec>& orbit,
                                          int iterations = 80, Real tol = 1e-10) {
  require(!orbit.empty(), "estimate_splitting: empty point list");
  SplittingSample sample(map, iterations, tol);
  for (const Vec& x : orbit) sample.add(SplittingSample::solve_point(map, x, iterations, tol));
  // invariance residuals where the successor is available
  for (auto& p : const_cast<std::vector<SplittingPoint>&>(sample.points())) {
    const Vec tx = map.apply(p.x);
    const SplittingPoint& succ = sample.at(tx);
    const Mat dt = map.derivative(p.x);
    p.residual_stable = detail::line_angle(dt * p.stable, succ.stable);
    p.residual_unstable = detail::line_angle(dt * p.unstable, succ.unstable);
  }
  return sample;
}

/// lambda_x(T^m) and nu_x(T^m): one-step contraction/expansion factors
/// multiplied along the orbit using the splitting evaluated at every orbit
/// point (numerically stable for large m, exact for 1D bundles).
inline std::pair<std::vector<Real>, std::vector<Real>> local_exponent_sequences(
    const SplittingSample& splitting, const Vec& x, int mmax) {
  const MapModel& map = splitting.map();
  std::vector<Real> lambda(mmax + 1, 1.0), nu(mmax + 1, 1.0);
  Vec y = x;
  for (int k = 1; k <= mmax; ++k) {
    const SplittingPoint& p = splitting.at(y);
    const Mat dt = map.derivative(y);
    lambda[k] = lambda[k - 1] * (dt * p.stable).norm();
    nu[k] = nu[k - 1] * (dt * p.unstable).norm();
    y = map.apply(y);
  }
  return {lambda, nu};
}

inline std::pair<Real, Real> local_exponents(const SplittingSample& splitting, const Vec& x,
                                             int m) {
  require(m >= 0, "local_exponents: m must be >= 0");
  require(splitting.contains(x), "local_exponents: point not in the splitting sample");
  if (m == 0) return {1.0, 1.0};
  auto [lambda, nu] = local_exponent_sequences(splitting, x, m);
  return {lambda[m], nu[m]};
}

/// R^{p,q,t}(T, g, Omega, m): sup over sampled points of
/// |det DT^m|^{-1/t} |g^{(m)}| max{lambda^p, nu^q}, with (.)^{1/inf} = 1.
inline Real r_pqt(const MapModel& map, const WeightField& g, const SplittingSample& splitting,
                  Real p, Real q, Real t, int m) {
  require(q <= 0.0 && 0.0 <= p, "r_pqt: requires q <= 0 <= p");
  require(t > 1.0 || std::isinf(t), "r_pqt: t must lie in (1, inf]");
  require(m >= 1, "r_pqt: m must be >= 1");
  require(!splitting.points().empty(), "r_pqt: empty sample");
  Real sup = 0.0;
  for (const auto& pt : splitting.points()) {
    auto [lambda, nu] = local_exponent_sequences(splitting, pt.x, m);
    Real det = 1.0;
    Vec y = pt.x;
    for (int k = 0; k < m; ++k) {
      det *= std::fabs(map.det_derivative(y));
      y = map.apply(y);
    }
    const Real gm = std::abs(weight_product(g, map, pt.x, m));
    const Real detfac = std::isinf(t) ? 1.0 : std::pow(det, -1.0 / t);
    sup = std::max(sup,
                   detfac * gm * std::max(std::pow(lambda[m], p), std::pow(nu[m], q)));
  }
  return sup;
}

/// Upper bound for the sub-additive limit: min over m <= mmax of the m-th
/// root of R(m).
inline Real r_pqt_limit(const MapModel& map, const WeightField& g,
                        const SplittingSample& splitting, Real p, Real q, Real t, int mmax) {
  Real best = kInf;
  for (int m = 1; m <= mmax; ++m)
    best = std::min(best, std::pow(r_pqt(map, g, splitting, p, q, t, m), 1.0 / m));
  return best;
}

/// ||T||_+ and ||T||_- of the cone-hyperbolicity section, measured over
/// sampled points and directions for the m-th iterate.
struct ConeExpansionNorms {
  Real plus = 0.0;   // sup ||DT^tr xi|| over unit xi whose image leaves C'_-
  Real minus = 0.0;  // inf ||DT^tr xi|| over unit xi outside C_+
};

/// Verifies cone-hyperbolicity DT^tr(complement int C+) in int C'_- on the
/// sample and evaluates the expansion norms.  Throws with a witness when the
/// assumption fails.
inline ConeExpansionNorms cone_expansion_norms(const MapModel& map,
                                               const ConeSystem& theta_src,
                                               const ConeSystem& theta_tgt,
                                               const std::vector<Vec>& support_points,
                                               int m = 1, int angle_samples = 720) {
  require(theta_src.dimension() == map.dimension() && theta_tgt.dimension() == map.dimension(),
          "cone_expansion_norms: dimension mismatch");
  require(!support_points.empty(), "cone_expansion_norms: empty sample");
  const auto dirs = unit_sphere_samples(map.dimension(), angle_samples);
  ConeExpansionNorms out;
  out.minus = kInf;
  bool plus_seen = false;
  for (const Vec& x : support_points) {
    const Mat dtr = iterate_derivative(map, x, m, /*transpose=*/true);
    for (const Vec& xi : dirs) {
      const Vec img = dtr * xi;
      const Real len = img.norm();
      if (!theta_src.interior_contains(Sign::plus, xi)) {
        if (!(len == 0.0 || theta_tgt.interior_contains(Sign::minus, img))) {
          throw std::runtime_error(
              "cone-hyperbolicity violated at x=(" + std::to_string(x[0]) + "," +
              std::to_string(x[1]) + "), xi=(" + std::to_string(xi[0]) + "," +
              std::to_string(xi[1]) + ")");
        }
        out.minus = std::min(out.minus, len);
      }
      if (!theta_tgt.contains(Sign::minus, img)) {
        out.plus = std::max(out.plus, len);
        plus_seen = true;
      }
    }
  }
  if (!plus_seen) out.plus = 0.0;
  return out;
}

/// The hook data of the Lasota-Yorke section: integers h_min, h_max,
/// h^-_min, h^+_max with their shrunken reference cones, the hook relation,
/// and the support-separation threshold N(T).
struct HookStructure {
  int h_min = 0, h_max = 0;
  int h_min_minus = 0, h_max_plus = 0;
  int nt = 3;
  ConeSystem source;  // Theta with the shrink used for the enlarged symbols
  ConeSystem target;  // Theta'
  Real norm_plus = 0.0, norm_minus = 0.0;

  /// (l,tau) hooks into (n,sigma)?
  bool hooks(int l, Sign tau, int n, Sign sigma) const {
    if (tau == Sign::plus && sigma == Sign::plus) return n <= l + h_max_plus;
    if (tau == Sign::minus && sigma == Sign::minus) return l + h_min_minus <= n;
    if (tau == Sign::plus && sigma == Sign::minus) return n >= h_min_minus || l >= -h_max_plus;
    return false;  // (tau,sigma) = (-,+) never hooks
  }
};

namespace detail {

/// Smallest integer h with 2^h > value * (1 + margin).
inline int strict_log2_above(Real value, Real margin = 1e-6) {
  require(value > 0.0, "strict_log2_above: value must be positive");
  int h = static_cast<int>(std::ceil(std::log2(value * (1.0 + margin))));
  while (std::ldexp(1.0, h) <= value * (1.0 + margin)) ++h;
  return h;
}

/// Largest integer h with 2^h < value / (1 + margin).
inline int strict_log2_below(Real value, Real margin = 1e-6) {
  require(value > 0.0, "strict_log2_below: value must be positive");
  int h = static_cast<int>(std::floor(std::log2(value / (1.0 + margin))));
  while (std::ldexp(1.0, h) >= value / (1.0 + margin)) --h;
  return h;
}

}  // namespace detail

/// Chooses the h integers extremal subject to their strict inequalities over
/// sampled points and directions.  The shrunken cones default to the cone
/// systems' enlarged_shrink and are enlarged in 10% steps when the
/// consistency requirements 2^{h^-_min} > 2^{-5}||T||_- and
/// 2^{h^+_max} < 2^{5}||T||_+ fail.
inline HookStructure hook_structure(const MapModel& map, const ConeSystem& theta_src,
                                    const ConeSystem& theta_tgt,
                                    const std::vector<Vec>& support_points,
                                    int angle_samples = 720) {
  const ConeExpansionNorms norms =
      cone_expansion_norms(map, theta_src, theta_tgt, support_points, 1, angle_samples);
  const auto dirs = unit_sphere_samples(map.dimension(), angle_samples);

  Real shrink = theta_src.enlarged_shrink();
  for (int attempt = 0; attempt < 8; ++attempt) {
    const ConeSystem src = theta_src.with_shrink(shrink);
    const ConeSystem tgt = theta_tgt.with_shrink(shrink);
    Real sup_all = 0.0, inf_all = kInf, sup_plus = 0.0, inf_minus = kInf;
    for (const Vec& x : support_points) {
      const Mat dtr = map.derivative(x).transpose();
      for (const Vec& xi : dirs) {
        const Vec img = dtr * xi;
        const Real len = img.norm();
        sup_all = std::max(sup_all, len);
        inf_all = std::min(inf_all, len);
        if (!tgt.tilde_contains(Sign::minus, img)) sup_plus = std::max(sup_plus, len);
        if (!src.tilde_contains(Sign::plus, xi)) inf_minus = std::min(inf_minus, len);
      }
    }
    HookStructure h;
    h.h_max = detail::strict_log2_above(sup_all) + 4;
    h.h_min = detail::strict_log2_below(inf_all) - 4;
    h.h_max_plus = sup_plus > 0.0 ? detail::strict_log2_above(sup_plus) + 4 : h.h_max;
    h.h_min_minus = detail::strict_log2_below(inf_minus) - 4;
    h.norm_plus = norms.plus;
    h.norm_minus = norms.minus;
    // consistency with the expansion norms, up to roundoff at the power-of-two
    // edge (attained by the identity map)
    const bool ok_minus =
        std::ldexp(1.0, h.h_min_minus) >= std::ldexp(norms.minus, -5) * (1.0 - 1e-9);
    const bool ok_plus =
        norms.plus == 0.0 ||
        std::ldexp(1.0, h.h_max_plus) <= std::ldexp(norms.plus, +5) * (1.0 + 1e-9);
    if (ok_minus && ok_plus) {
      h.nt = std::max({3, h.h_min_minus + 3, -h.h_max_plus + 3});
      h.source = src;
      h.target = tgt;
      return h;
    }
    shrink = std::min(0.999, shrink + 0.1 * (1.0 - shrink));
  }
  throw std::runtime_error(
      "hook_structure: could not reconcile the h integers with ||T||_+-/; widen sampling "
      "or adjust the cones");
}

/// Planar cone systems adapted to a hyperbolic 2D linear map: cores along the
/// contracting/expanding eigendirections of A^tr.  `gap` is the angular
/// half-width left around the expanding axis; the returned pair (Theta,
/// Theta') has Theta' < Theta and tight asymptotic expansion norms.
inline std::pair<ConeSystem, ConeSystem> eigen_cone_pair(const MapModel& map, Real gap) {
  require(map.dimension() == 2, "eigen_cone_pair: planar maps only");
  const Mat atr = map.linear_real().transpose();
  const Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(atr));
  int iu = 0, is = 1;
  if (std::abs(es.eigenvalues()[0]) < std::abs(es.eigenvalues()[1])) std::swap(iu, is);
  check_runtime(std::abs(es.eigenvalues()[iu]) > 1.0 + 1e-9 &&
                    std::abs(es.eigenvalues()[is]) < 1.0 - 1e-9,
                "eigen_cone_pair: linear part is not hyperbolic");
  check_runtime(std::fabs(es.eigenvalues()[iu].imag()) < 1e-12,
                "eigen_cone_pair: complex eigenvalues");
  Mat ucore(2, 1), score(2, 1);
  ucore << es.eigenvectors().col(iu)(0).real(), es.eigenvectors().col(iu)(1).real();
  score << es.eigenvectors().col(is)(0).real(), es.eigenvectors().col(is)(1).real();
  // Theta: wide C+ around the contracting axis, narrow C- around the
  // expanding axis; Theta': the mirror with a wide C'_-
  const ConeSystem theta(score, kPi / 2.0 - 2.0 * gap, ucore, gap);
  const ConeSystem theta_prime(score, gap, ucore, kPi / 2.0 - 2.0 * gap);
  return {theta, theta_prime};
}

/// Balanced cone system for a hyperbolic 2D linear map, usable with
/// Theta' = Theta (cone-hyperbolicity holds for moderate apertures).
inline ConeSystem balanced_cones(const MapModel& map, Real aperture = 0.55) {
  auto [theta, theta_prime] = eigen_cone_pair(map, 0.1);
  return ConeSystem(theta.plus_axes(), aperture, theta.minus_axes(), aperture);
}

}  // namespace coneflow

#endif  // CONEFLOW_HYPERBOLICITY_HPP
