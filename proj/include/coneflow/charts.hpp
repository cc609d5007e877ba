#ifndef CONEFLOW_CHARTS_HPP
#define CONEFLOW_CHARTS_HPP

#include "coneflow/hyperbolicity.hpp"
#include "coneflow/norms.hpp"

#include <functional>

namespace coneflow {

/// A finite C^r partition of unity on K: sum g_i = 1 on K, sum g_i <= 1
/// everywhere, together with its intersection multiplicity.
class PartitionOfUnity {
 public:
  PartitionOfUnity(std::vector<GridFunction> pieces, Real smoothness = kInf,
                   const std::vector<std::uint8_t>* k_mask = nullptr, Real tol = 1e-10)
      : pieces_(std::move(pieces)), smoothness_(smoothness) {
    require(!pieces_.empty(), "PartitionOfUnity: no pieces");
    const FrequencyLattice& lat = pieces_.front().lattice();
    for (const auto& g : pieces_)
      require(g.lattice() == lat, "PartitionOfUnity: lattice mismatch");
    multiplicity_ = 0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
      Real sum = 0.0;
      int count = 0;
      for (const auto& g : pieces_) {
        const Real v = g[i].real();
        check_runtime(std::fabs(g[i].imag()) <= tol && v >= -tol,
                      "PartitionOfUnity: pieces must be nonnegative real");
        sum += v;
        if (std::abs(g[i]) > 1e-12) ++count;
      }
      check_runtime(sum <= 1.0 + tol, "PartitionOfUnity: sum exceeds 1");
      if (!k_mask || (*k_mask)[i])
        check_runtime(std::fabs(sum - 1.0) <= tol, "PartitionOfUnity: sum != 1 on K");
      multiplicity_ = std::max(multiplicity_, count);
    }
  }

  const std::vector<GridFunction>& pieces() const { return pieces_; }
  int multiplicity() const { return multiplicity_; }
  Real smoothness() const { return smoothness_; }

  std::vector<GridFunction> split(const GridFunction& u) const {
    std::vector<GridFunction> out;
    out.reserve(pieces_.size());
    for (const auto& g : pieces_) {
      GridFunction ui = u;
      ui.pointwise_multiply(g);
      out.push_back(std::move(ui));
    }
    return out;
  }

 private:
  std::vector<GridFunction> pieces_;
  Real smoothness_;
  int multiplicity_ = 0;
};

/// Two smooth half-box bumps along the first axis forming a partition of
/// unity on the whole torus with intersection multiplicity 2.
inline PartitionOfUnity two_bump_partition(const FrequencyLattice& lattice) {
  const Real l = lattice.box_lengths()[0];
  auto ramp = [&](Real x) {
    // 1 on [0, 3L/8] and [7L/8, L), 0 on [L/2, 7L/8), smooth in between
    const Real t = x / l;
    if (t < 3.0 / 8.0) return 1.0;
    if (t < 4.0 / 8.0) return 1.0 - smooth_step01((t - 3.0 / 8.0) * 8.0);
    if (t < 7.0 / 8.0) return 0.0;
    return smooth_step01((t - 7.0 / 8.0) * 8.0);
  };
  GridFunction g1 = GridFunction::sampled(lattice, [&](const Vec& x) { return ramp(x[0]); });
  GridFunction g2 = GridFunction::sampled(lattice, [&](const Vec& x) { return 1.0 - ramp(x[0]); });
  std::vector<GridFunction> pieces;
  pieces.push_back(std::move(g1));
  pieces.push_back(std::move(g2));
  return PartitionOfUnity(std::move(pieces));
}

/// Affine local chart kappa(x) = linear x + offset on a region of the torus,
/// carrying its own cone combination.
struct AffineChart {
  Mat linear;
  Vec offset;
  ConeSystem cones;
  std::function<bool(const Vec&)> region;  // V_j membership

  Vec apply(const Vec& x) const { return linear * x + offset; }
  Vec apply_inverse(const Vec& y) const { return linear.inverse() * (y - offset); }
};

/// Finite system of affine charts covering V, with a subordinate partition.
class ChartSystem {
 public:
  ChartSystem(std::vector<AffineChart> charts, PartitionOfUnity partition)
      : charts_(std::move(charts)), partition_(std::move(partition)) {
    require(charts_.size() == partition_.pieces().size(),
            "ChartSystem: one partition piece per chart");
  }

  /// The whole torus as a single identity chart withphi = 1.
  static ChartSystem trivial(const FrequencyLattice& lattice, const ConeSystem& cones) {
    AffineChart c;
    const int d = lattice.dimension();
    c.linear = Mat::Identity(d, d);
    c.offset = Vec::Zero(d);
    c.cones = cones;
    c.region = [](const Vec&) { return true; };
    std::vector<GridFunction> ones;
    ones.push_back(GridFunction::sampled(lattice, [](const Vec&) { return 1.0; }));
    return ChartSystem({c}, PartitionOfUnity(std::move(ones)));
  }

  const std::vector<AffineChart>& charts() const { return charts_; }
  const PartitionOfUnity& partition() const { return partition_; }
  std::size_t size() const { return charts_.size(); }

 private:
  std::vector<AffineChart> charts_;
  PartitionOfUnity partition_;
};

/// Lambda_{m,t}: the chartwise sup of |g^{(m)}| max{||T^m_{jk}||_+^p,
/// ||T^m_{jk}||_-^q} / |det DT^m|^{1/t} over sampled points of
/// kappa_j(V_{m,jk}), comparable to R^{p,q,t}(T,g,Omega,m) by the sandwich
/// estimate.
inline Real lambda_mt(const MapModel& map, const WeightField& g, const ChartSystem& charts,
                      int m, Real t, Real p, Real q, int samples_per_axis = 16,
                      int angle_samples = 512) {
  require(m >= 1, "lambda_mt: m must be >= 1");
  require(t > 1.0 || std::isinf(t), "lambda_mt: t must lie in (1, inf]");
  const int d = map.dimension();
  const auto dirs = unit_sphere_samples(d, angle_samples);
  Real best = 0.0;
  bool any_sample = false;
  const std::size_t total = static_cast<std::size_t>(ipow(samples_per_axis, d));
  for (std::size_t j = 0; j < charts.size(); ++j) {
    for (std::size_t k = 0; k < charts.size(); ++k) {
      const AffineChart& cj = charts.charts()[j];
      const AffineChart& ck = charts.charts()[k];
      for (std::size_t s = 0; s < total; ++s) {
        std::size_t rest = s;
        Vec y(d);
        for (int a = 0; a < d; ++a) {
          y[a] = kTwoPi * (static_cast<Real>(rest % samples_per_axis) + 0.5) / samples_per_axis;
          rest /= samples_per_axis;
        }
        if (!cj.region(y) || !ck.region(map.iterate(y, m))) continue;
        any_sample = true;
        // T^m_{jk} = kappa_k o T^m o kappa_j^{-1}; evaluated at x = kappa_j(y)
        const Mat dtm = iterate_derivative(map, y, m);
        const Mat chart_d = ck.linear * dtm * cj.linear.inverse();
        const Mat dtr = chart_d.transpose();
        Real plus = 0.0, minus = kInf;
        for (const Vec& xi : dirs) {
          const Vec img = dtr * xi;
          if (!ck.cones.contains(Sign::minus, img)) plus = std::max(plus, img.norm());
          if (!cj.cones.contains(Sign::plus, xi)) minus = std::min(minus, img.norm());
        }
        Real det = 1.0;
        {
          Vec z = y;
          for (int i = 0; i < m; ++i) {
            det *= std::fabs(map.det_derivative(z));
            z = map.apply(z);
          }
        }
        const Real gm = std::abs(weight_product(g, map, y, m));
        const Real detfac = std::isinf(t) ? 1.0 : std::pow(det, -1.0 / t);
        const Real grow = std::max(plus > 0.0 ? std::pow(plus, p) : 0.0,
                                   std::isfinite(minus) ? std::pow(minus, q) : 0.0);
        best = std::max(best, gm * grow * detfac);
      }
    }
  }
  check_runtime(any_sample, "lambda_mt: empty chart intersection set");
  return best;
}

namespace detail {

/// Composition with an affine chart map on the grid: exact index permutation
/// when the map sends grid to grid, separable Lagrange interpolation (order
/// stencil-1) otherwise.
inline GridFunction compose_affine(const GridFunction& u, const Mat& linear, const Vec& offset,
                                   int stencil = 12) {
  const FrequencyLattice& lat = u.lattice();
  const int d = lat.dimension();
  const int n = lat.grid_size();
  GridFunction out(lat);
  const Real h = lat.box_lengths()[0] / n;
  // exact when linear is integer and offset a multiple of the grid step
  bool exact = true;
  for (int a = 0; a < d && exact; ++a) {
    for (int b = 0; b < d && exact; ++b)
      if (std::fabs(linear(a, b) - std::llround(linear(a, b))) > 1e-13) exact = false;
    if (std::fabs(offset[a] / h - std::llround(offset[a] / h)) > 1e-10) exact = false;
  }
  IVec idx(d), src(d);
  if (exact) {
    IMat lin_i(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) lin_i(a, b) = std::llround(linear(a, b));
    IVec off_i(d);
    for (int a = 0; a < d; ++a) off_i[a] = std::llround(offset[a] / h);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      lat.unrank(i, idx);
      src = lin_i * idx + off_i;
      out[i] = u[lat.rank(src)];
    }
    return out;
  }
  // Lagrange fallback
  require(stencil >= 2 && stencil % 2 == 0, "compose_affine: stencil must be even");
  std::vector<Real> wts(stencil);
  std::vector<std::int64_t> base(d);
  std::vector<std::vector<Real>> axis_w(d, std::vector<Real>(stencil));
  for (std::size_t i = 0; i < lat.size(); ++i) {
    lat.unrank(i, idx);
    Vec x(d);
    for (int a = 0; a < d; ++a) x[a] = h * static_cast<Real>(idx[a]);
    const Vec y = lat.wrap(linear * x + offset);
    for (int a = 0; a < d; ++a) {
      const Real pos = y[a] / h;
      const std::int64_t i0 = static_cast<std::int64_t>(std::floor(pos));
      const Real frac = pos - static_cast<Real>(i0);
      base[a] = i0 - stencil / 2 + 1;
      for (int s = 0; s < stencil; ++s) {
        Real wv = 1.0;
        const Real node = static_cast<Real>(s - stencil / 2 + 1);
        for (int r = 0; r < stencil; ++r) {
          if (r == s) continue;
          const Real node_r = static_cast<Real>(r - stencil / 2 + 1);
          wv *= (frac - node_r) / (node - node_r);
        }
        axis_w[a][s] = wv;
      }
    }
    // separable gather (implemented for d <= 3)
    Cplx acc(0.0, 0.0);
    if (d == 1) {
      for (int s = 0; s < stencil; ++s) {
        IVec jx(1);
        jx[0] = base[0] + s;
        acc += axis_w[0][s] * u[lat.rank(jx)];
      }
    } else if (d == 2) {
      for (int s0 = 0; s0 < stencil; ++s0) {
        Cplx row(0.0, 0.0);
        for (int s1 = 0; s1 < stencil; ++s1) {
          IVec jx(2);
          jx << base[0] + s0, base[1] + s1;
          row += axis_w[1][s1] * u[lat.rank(jx)];
        }
        acc += axis_w[0][s0] * row;
      }
    } else {
      for (int s0 = 0; s0 < stencil; ++s0) {
        Cplx plane(0.0, 0.0);
        for (int s1 = 0; s1 < stencil; ++s1) {
          Cplx row(0.0, 0.0);
          for (int s2 = 0; s2 < stencil; ++s2) {
            IVec jx(3);
            jx << base[0] + s0, base[1] + s1, base[2] + s2;
            row += axis_w[2][s2] * u[lat.rank(jx)];
          }
          plane += axis_w[1][s1] * row;
        }
        acc += axis_w[0][s0] * plane;
      }
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace detail

/// max_j || (phi_j u) o kappa_j^{-1} ||_{Theta_j, p, q (,t)}: the patched
/// norm built from chart-local anisotropic norms.
inline Real patched_norm(const GridFunction& u, const ChartSystem& charts, Real p, Real q,
                         Real t, NormKind family) {
  Real best = 0.0;
  for (std::size_t j = 0; j < charts.size(); ++j) {
    GridFunction piece = u;
    piece.pointwise_multiply(charts.partition().pieces()[j]);
    const AffineChart& c = charts.charts()[j];
    // (phi u) o kappa^{-1} (y) = (phi u)(kappa^{-1} y)
    const GridFunction pushed =
        detail::compose_affine(piece, c.linear.inverse(), (-c.linear.inverse() * c.offset).eval());
    const Decomposer dec(u.lattice(), c.cones);
    const Real v = family == NormKind::holder ? aniso_holder_norm(dec, pushed, p, q)
                                              : aniso_sobolev_norm(dec, pushed, p, q, t);
    best = std::max(best, v);
  }
  return best;
}

/// Measured two-sided partition comparison (the Lemma/Proposition pair of the
/// partition section): all raw norm values plus the constants they certify.
struct PartitionCompareReport {
  // splitting direction: ||u|| vs nu max_i ||u_i|| + C sum_i ||u_i||_weak
  Real whole = 0.0;             // ||u||_{Theta,p,q}
  Real piece_aggregate = 0.0;   // max_i ||u_i|| (Holder) or (sum ||u_i||^t)^{1/t} (Sobolev)
  Real weak_sum = 0.0;          // sum_i ||u_i||_{Theta,p',q'}
  Real c_split = 0.0;           // required weak coefficient
  int multiplicity = 0;
  // opposite direction (requires Theta' < Theta):
  // max_i ||u_i||_{Theta'} <= C0 ||u||_Theta + C ||u||_weak
  Real piece_max_refined = 0.0;  // max_i ||u_i||_{Theta',p,q}
  Real whole_weak = 0.0;         // ||u||_{Theta,p',q'}
  Real c0_opposite = 0.0;        // required strong coefficient with C = 1
};

inline PartitionCompareReport partition_split_compare(
    const GridFunction& u, const PartitionOfUnity& pu, const ConeSystem& theta, Real p, Real q,
    Real p_weak, Real q_weak, Real t, NormKind family, const ConeSystem* theta_refined = nullptr) {
  require(p_weak <= p && q_weak <= q, "partition_split_compare: weak params must be weaker");
  PartitionCompareReport rep;
  rep.multiplicity = pu.multiplicity();
  const Decomposer dec(u.lattice(), theta);
  auto norm_of = [&](const GridFunction& v, Real pp, Real qq, const Decomposer& dd) {
    return family == NormKind::holder ? aniso_holder_norm(dd, v, pp, qq)
                                      : aniso_sobolev_norm(dd, v, pp, qq, t);
  };
  rep.whole = norm_of(u, p, q, dec);
  rep.whole_weak = norm_of(u, p_weak, q_weak, dec);
  const std::vector<GridFunction> pieces = pu.split(u);
  Real agg = 0.0;
  for (const auto& ui : pieces) {
    const Real strong = norm_of(ui, p, q, dec);
    rep.weak_sum += norm_of(ui, p_weak, q_weak, dec);
    if (family == NormKind::holder)
      agg = std::max(agg, strong);
    else
      agg += std::pow(strong, t);
  }
  rep.piece_aggregate = family == NormKind::holder ? agg : std::pow(agg, 1.0 / t);
  const Real gap = rep.whole - rep.multiplicity * rep.piece_aggregate;
  rep.c_split = rep.weak_sum > 0.0 ? std::max(0.0, gap) / rep.weak_sum : 0.0;

  if (theta_refined) {
    require(refines(*theta_refined, theta), "partition_split_compare: Theta' must refine Theta");
    const Decomposer dec_ref(u.lattice(), *theta_refined);
    for (const auto& ui : pieces)
      rep.piece_max_refined = std::max(rep.piece_max_refined, norm_of(ui, p, q, dec_ref));
    rep.c0_opposite =
        rep.whole > 0.0 ? std::max(0.0, rep.piece_max_refined - rep.whole_weak) / rep.whole : 0.0;
  }
  return rep;
}

}  // namespace coneflow

#endif  // CONEFLOW_CHARTS_HPP
