#ifndef CONEFLOW_NORMS_HPP
#define CONEFLOW_NORMS_HPP

#include "coneflow/decomposition.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace coneflow {

/// Anisotropic norm parameters: regularity p along the + cone, q along the -
/// cone, integrability t in (1,inf) or infinity.  For dynamical use q < 0 < p;
/// the struct itself accepts any reals (diagnostics).
struct NormParams {
  Real p = 1.0;
  Real q = -1.0;
  Real t = kInf;
  ConeSystem theta;
};

inline Real weight_exponent(Real p, Real q, Sign s) { return s == Sign::plus ? p : q; }

enum class NormKind { holder, sobolev };  // the C^{p,q} max-form vs the W^{p,q} l2-form

/// A point of C^Gamma: finitely many (n,sigma) -> complex entries.
using GammaSequence = std::map<GammaIndex, Cplx>;

/// |f|_{C^{p,q}} = max{ sup 2^{pn}|f_{n,+}|, sup 2^{qn}|f_{n,-}| } or
/// |f|_{W^{p,q}} = sqrt( sum 4^{pn}|f_{n,+}|^2 + 4^{qn}|f_{n,-}|^2 ).
inline Real gamma_norm(const GammaSequence& f, Real p, Real q, NormKind kind) {
  if (kind == NormKind::holder) {
    Real m = 0.0;
    for (const auto& [g, v] : f)
      m = std::max(m, pow2(weight_exponent(p, q, g.sigma) * g.n) * std::abs(v));
    return m;
  }
  Real s = 0.0;
  for (const auto& [g, v] : f)
    s += pow2(2.0 * weight_exponent(p, q, g.sigma) * g.n) * std::norm(v);
  return std::sqrt(s);
}

/// ||u||_{C^{Theta,p,q}} = sup_x |Q_Theta u|_{C^{p,q}}(x)
///                       = max_{n,sigma} 2^{c(sigma) n} ||u_{Theta,n,sigma}||_inf.
inline Real aniso_holder_norm(const SpectralBlocks& blocks, Real p, Real q) {
  Real m = 0.0;
  for (const auto& [g, b] : blocks.blocks)
    m = std::max(m, pow2(weight_exponent(p, q, g.sigma) * g.n) * b.linf_norm());
  return m;
}

/// ||u||_{W^{Theta,p,q,t}} = || ( sum 4^{pn}|u_{n,+}|^2 + 4^{qn}|u_{n,-}|^2 )^{1/2} ||_{L^t}.
inline Real aniso_sobolev_norm(const SpectralBlocks& blocks, Real p, Real q, Real t,
                               bool normalized = true) {
  require(t > 1.0 && !std::isinf(t), "aniso_sobolev_norm: t must lie in (1,inf)");
  require(!blocks.blocks.empty(), "aniso_sobolev_norm: no blocks");
  const FrequencyLattice& lat = blocks.blocks.begin()->second.lattice();
  std::vector<Real> agg(lat.size(), 0.0);
  for (const auto& [g, b] : blocks.blocks) {
    const Real w = pow2(2.0 * weight_exponent(p, q, g.sigma) * g.n);
    for (std::size_t i = 0; i < agg.size(); ++i) agg[i] += w * std::norm(b[i]);
  }
  const Real wq = normalized ? 1.0 / static_cast<Real>(agg.size()) : lat.cell_volume();
  Real s = 0.0;
  for (Real a : agg) s += std::pow(a, t / 2.0);
  return std::pow(wq * s, 1.0 / t);
}

inline Real aniso_holder_norm(const Decomposer& dec, const GridFunction& u, Real p, Real q) {
  return aniso_holder_norm(dec.decompose(u), p, q);
}
inline Real aniso_sobolev_norm(const Decomposer& dec, const GridFunction& u, Real p, Real q,
                               Real t, bool normalized = true) {
  return aniso_sobolev_norm(dec.decompose(u), p, q, t, normalized);
}

inline Real aniso_norm(const SpectralBlocks& blocks, const NormParams& np,
                       bool normalized = true) {
  if (std::isinf(np.t)) return aniso_holder_norm(blocks, np.p, np.q);
  return aniso_sobolev_norm(blocks, np.p, np.q, np.t, normalized);
}

/// Classical comparison norms.
struct ClassicalNorms {
  Real dyadic = 0.0;            // sup_n 2^{sn}||u_n||_inf, or the l2-aggregate L^t form
  Real integral_form = 0.0;     // ||(1+Delta)^{s/2} u||_{L^t}; only for finite t
  Real holder_quotient = 0.0;   // finite-difference C^s form; only for t=inf, s>0 noninteger
  bool has_integral_form = false;
  bool has_holder_quotient = false;
};

namespace detail {

/// Isotropic dyadic pieces u_n = psi_n(D) u for n = 0..nmax.
inline std::vector<GridFunction> isotropic_blocks(const GridFunction& u,
                                                  const ChiProfile& profile, int nmax) {
  const FrequencyLattice& lat = u.lattice();
  const std::vector<Cplx> hat = spectrum(u);
  std::vector<GridFunction> out;
  std::vector<Cplx> tmp(hat.size());
  for (int n = 0; n <= nmax; ++n) {
    for (std::size_t i = 0; i < hat.size(); ++i)
      tmp[i] = hat[i] * eval_shell(profile, ShellKind::psi, n, lat.freq(i));
    out.push_back(synthesize(lat, tmp));
  }
  return out;
}

/// Partial derivative of order alpha via the Fourier multiplier (i xi)^alpha.
inline GridFunction spectral_derivative(const GridFunction& u, const IVec& alpha) {
  const FrequencyLattice& lat = u.lattice();
  std::vector<Cplx> hat = spectrum(u);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const Vec xi = lat.freq(i);
    Cplx m(1.0, 0.0);
    for (int a = 0; a < lat.dimension(); ++a)
      for (std::int64_t r = 0; r < alpha[a]; ++r) m *= Cplx(0.0, xi[a]);
    hat[i] *= m;
  }
  return synthesize(lat, hat);
}

inline void enumerate_multi_indices(int d, int order, IVec& cur, int axis,
                                    std::vector<IVec>& out) {
  if (axis == d - 1) {
    cur[axis] = order;
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= order; ++k) {
    cur[axis] = k;
    enumerate_multi_indices(d, order - k, cur, axis + 1, out);
  }
}

inline std::vector<IVec> multi_indices(int d, int order) {
  std::vector<IVec> out;
  IVec cur(d);
  enumerate_multi_indices(d, order, cur, 0, out);
  return out;
}

}  // namespace detail

/// ||u||_{C^s} (t = inf) or ||u||_{W^{s,t}}: dyadic form plus the equivalent
/// closed forms used for cross-validation.  The Holder finite-difference
/// quotient is only defined for non-integer s > 0; requesting it at integer s
/// is an error.
inline ClassicalNorms classical_norms(const GridFunction& u, Real s, Real t,
                                      bool want_holder_quotient = false,
                                      const ChiProfile& profile = {},
                                      bool normalized = true) {
  ClassicalNorms out;
  const FrequencyLattice& lat = u.lattice();
  const int nmax = lat.default_nmax();
  const std::vector<GridFunction> un = detail::isotropic_blocks(u, profile, nmax);

  if (std::isinf(t)) {
    Real m = 0.0;
    for (int n = 0; n <= nmax; ++n) m = std::max(m, pow2(s * n) * un[n].linf_norm());
    out.dyadic = m;
  } else {
    require(t > 1.0, "classical_norms: t must lie in (1,inf) or be infinity");
    std::vector<Real> agg(lat.size(), 0.0);
    for (int n = 0; n <= nmax; ++n) {
      const Real w = pow2(2.0 * s * n);
      for (std::size_t i = 0; i < agg.size(); ++i) agg[i] += w * std::norm(un[n][i]);
    }
    const Real wq = normalized ? 1.0 / static_cast<Real>(agg.size()) : lat.cell_volume();
    Real acc = 0.0;
    for (Real a : agg) acc += std::pow(a, t / 2.0);
    out.dyadic = std::pow(wq * acc, 1.0 / t);

    // (1+Delta)^{s/2} in Fourier is (1+|xi|^2)^{s/2}
    std::vector<Cplx> hat = spectrum(u);
    for (std::size_t i = 0; i < hat.size(); ++i)
      hat[i] *= std::pow(1.0 + lat.freq(i).squaredNorm(), s / 2.0);
    out.integral_form = synthesize(lat, hat).lt_norm(t, normalized);
    out.has_integral_form = true;
  }

  if (want_holder_quotient) {
    require(std::isinf(t), "classical_norms: Holder quotient is a sup-norm form (t=inf)");
    const int whole = static_cast<int>(std::floor(s));
    require(s > 0.0 && s != std::floor(s),
            "classical_norms: Holder quotient requested at integer exponent");
    const Real frac = s - whole;
    Real value = 0.0;
    for (int ord = 0; ord <= whole; ++ord)
      for (const IVec& alpha : detail::multi_indices(lat.dimension(), ord))
        value = std::max(value, detail::spectral_derivative(u, alpha).linf_norm());
    // finite differences of the top-order derivatives along axis offsets
    const int n_grid = lat.grid_size();
    for (const IVec& alpha : detail::multi_indices(lat.dimension(), whole)) {
      const GridFunction du = detail::spectral_derivative(u, alpha);
      for (int axis = 0; axis < lat.dimension(); ++axis) {
        for (int off = 1; off <= n_grid / 4; off *= 2) {
          const Real y = lat.box_lengths()[axis] / n_grid * off;
          IVec shift = IVec::Zero(lat.dimension());
          shift[axis] = off;
          Real diff = 0.0;
          IVec idx(lat.dimension());
          for (std::size_t i = 0; i < lat.size(); ++i) {
            lat.unrank(i, idx);
            IVec jdx = idx + shift;
            diff = std::max(diff, std::abs(du[lat.rank(jdx)] - du[i]));
          }
          value = std::max(value, diff / std::pow(y, frac));
        }
      }
    }
    out.holder_quotient = value;
    out.has_holder_quotient = true;
  }
  return out;
}

enum class DaggerVariant { dagger, doubledagger };

/// Appendix norms built from the weight symbols Psi_{Theta,p,+}, Psi_{Theta,q,-}:
/// dagger = sum of the two L^t norms, doubledagger = L^t norm of the sum.
inline Real dagger_norm(const GridFunction& u, const NormParams& np, DaggerVariant variant,
                        bool normalized = true) {
  require(np.t > 1.0 && !std::isinf(np.t), "dagger_norm: t must lie in (1,inf)");
  const FrequencyLattice& lat = u.lattice();
  std::vector<Cplx> hat = spectrum(u);
  std::vector<Cplx> hp(hat.size()), hm(hat.size());
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const Vec xi = lat.freq(i);
    hp[i] = hat[i] * eval_weight_symbol(np.theta, np.p, Sign::plus, xi);
    hm[i] = hat[i] * eval_weight_symbol(np.theta, np.q, Sign::minus, xi);
  }
  if (variant == DaggerVariant::dagger) {
    return synthesize(lat, hp).lt_norm(np.t, normalized) +
           synthesize(lat, hm).lt_norm(np.t, normalized);
  }
  for (std::size_t i = 0; i < hat.size(); ++i) hp[i] += hm[i];
  return synthesize(lat, hp).lt_norm(np.t, normalized);
}

/// Singular values of the identity map from the (p,q)-weighted block space to
/// the weaker (p',q')-weighted block space.  In the diagonal mode basis the
/// embedding is diagonal with ratio 2^{(c'(sigma)-c(sigma)) n}; restricted to
/// a random `sample_dim`-dimensional subspace the singular values are those of
/// that diagonal times an orthonormal frame.  sample_dim <= 0 returns the
/// diagonal ratios themselves, sorted decreasingly.
inline std::vector<Real> embedding_singular_values(Real p, Real q, Real p_weak, Real q_weak,
                                                   int nmax, int sample_dim = 0,
                                                   std::uint64_t seed = 1234) {
  require(p_weak <= p && q_weak <= q,
          "embedding_singular_values: weaker space must have p' <= p, q' <= q");
  std::vector<Real> diag;
  for (int n = 0; n <= nmax; ++n)
    for (Sign s : {Sign::plus, Sign::minus})
      diag.push_back(pow2((weight_exponent(p_weak, q_weak, s) - weight_exponent(p, q, s)) * n));
  if (sample_dim <= 0) {
    std::sort(diag.rbegin(), diag.rend());
    return diag;
  }
  const int dim = static_cast<int>(diag.size());
  require(sample_dim <= dim, "embedding_singular_values: sample_dim too large");
  Rng rng(seed);
  CMatrix g(dim, sample_dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < sample_dim; ++j) g(i, j) = rng.cgaussian();
  const CMatrix qmat = Eigen::HouseholderQR<CMatrix>(g)
                           .householderQ() * CMatrix::Identity(dim, sample_dim);
  CMatrix dq = qmat;
  for (int i = 0; i < dim; ++i) dq.row(i) *= diag[static_cast<std::size_t>(i)];
  Eigen::JacobiSVD<CMatrix> svd(dq);
  std::vector<Real> out(svd.singularValues().data(),
                        svd.singularValues().data() + svd.singularValues().size());
  return out;
}

}  // namespace coneflow

#endif  // CONEFLOW_NORMS_HPP
