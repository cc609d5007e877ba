#ifndef CONEFLOW_MAP_MODEL_HPP
#define CONEFLOW_MAP_MODEL_HPP

#include "coneflow/lattice.hpp"

#include <functional>

namespace coneflow {

/// One trigonometric perturbation term: adds Re(amplitude e^{i<k,x>}) to the
/// named component of the map.
struct TrigTerm {
  int component = 0;
  IVec freq;
  Cplx amplitude;
};

/// Hyperbolic map on the 2 pi torus: integer linear part plus a
/// trigonometric-polynomial perturbation,
///   T(x) = A x + sum_t Re(a_t e^{i <k_t, x>}) e_{c_t}.
/// The inverse of the linear part is closed-form; perturbed inverses are
/// found by fixed-point iteration seeded with it.
class MapModel {
 public:
  MapModel() = default;

  explicit MapModel(IMat linear, std::vector<TrigTerm> perturbation = {},
                    Real smoothness = kInf)
      : linear_(std::move(linear)), perturbation_(std::move(perturbation)),
        smoothness_(smoothness) {
    require(linear_.rows() == linear_.cols(), "MapModel: linear part must be square");
    require(linear_.rows() >= 1 && linear_.rows() <= kMaxDim, "MapModel: dimension out of range");
    linear_real_ = linear_.cast<Real>();
    const Real det = linear_real_.determinant();
    require(std::fabs(det) > 0.5, "MapModel: linear part must be invertible over Z");
    linear_inv_ = linear_real_.inverse();
    for (const TrigTerm& t : perturbation_) {
      require(t.component >= 0 && t.component < dimension(), "MapModel: bad component index");
      require(t.freq.size() == dimension(), "MapModel: bad frequency dimension");
    }
  }

  static MapModel identity(int d) {
    return MapModel(IMat::Identity(d, d).eval());
  }

  /// Arnold cat map [[2,1],[1,1]].
  static MapModel cat() {
    IMat a(2, 2);
    a << 2, 1, 1, 1;
    return MapModel(a);
  }

  MapModel with_term(int component, IVec freq, Cplx amplitude, Real smoothness) const {
    std::vector<TrigTerm> terms = perturbation_;
    terms.push_back({component, std::move(freq), amplitude});
    return MapModel(linear_, std::move(terms), smoothness);
  }

  int dimension() const { return static_cast<int>(linear_.rows()); }
  const IMat& linear() const { return linear_; }
  const Mat& linear_real() const { return linear_real_; }
  const Mat& linear_inverse() const { return linear_inv_; }
  const std::vector<TrigTerm>& perturbation() const { return perturbation_; }
  bool is_linear() const { return perturbation_.empty(); }
  Real smoothness() const { return smoothness_; }

  Vec apply(const Vec& x) const {
    Vec y = linear_real_ * x;
    for (const TrigTerm& t : perturbation_) {
      const Real phase = t.freq.cast<Real>().dot(x);
      y[t.component] += (t.amplitude * std::polar(1.0, phase)).real();
    }
    return y;
  }

  Mat derivative(const Vec& x) const {
    Mat d = linear_real_;
    for (const TrigTerm& t : perturbation_) {
      const Cplx e = t.amplitude * std::polar(1.0, t.freq.cast<Real>().dot(x));
      // d/dx_j Re(a e^{ikx}) = -Im(a e^{ikx}) k_j
      for (int j = 0; j < dimension(); ++j)
        d(t.component, j) += -e.imag() * static_cast<Real>(t.freq[j]);
    }
    return d;
  }

  Real det_derivative(const Vec& x) const { return derivative(x).determinant(); }

  /// Unique preimage on the torus via x = A^{-1}(y - tau(x)); requires the
  /// perturbation to be a contraction after A^{-1}, which holds for the small
  /// amplitudes used here.
  Vec apply_inverse(const Vec& y, Real tol = 1e-12, int max_iter = 200) const {
    Vec x = linear_inv_ * y;
    if (is_linear()) return x;
    for (int it = 0; it < max_iter; ++it) {
      Vec tau = Vec::Zero(dimension());
      for (const TrigTerm& t : perturbation_) {
        const Real phase = t.freq.cast<Real>().dot(x);
        tau[t.component] += (t.amplitude * std::polar(1.0, phase)).real();
      }
      const Vec next = linear_inv_ * (y - tau);
      const Real step = (next - x).norm();
      x = next;
      if (step < tol) return x;
    }
    throw std::runtime_error("MapModel: inverse fixed point did not converge");
  }

  Vec iterate(Vec x, int m) const {
    for (int k = 0; k < m; ++k) x = apply(x);
    return x;
  }
  Vec iterate_inverse(Vec x, int m) const {
    for (int k = 0; k < m; ++k) x = apply_inverse(x);
    return x;
  }

  /// Smallest |det DT| over a coarse grid sample (diffeomorphism check).
  Real min_abs_det(int samples_per_axis = 24) const {
    Real best = kInf;
    IVec idx(dimension());
    const std::size_t total = static_cast<std::size_t>(ipow(samples_per_axis, dimension()));
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rest = i;
      Vec x(dimension());
      for (int a = 0; a < dimension(); ++a) {
        x[a] = kTwoPi * static_cast<Real>(rest % samples_per_axis) / samples_per_axis;
        rest /= samples_per_axis;
      }
      best = std::min(best, std::fabs(det_derivative(x)));
    }
    return best;
  }

 private:
  IMat linear_;
  Mat linear_real_, linear_inv_;
  std::vector<TrigTerm> perturbation_;
  Real smoothness_ = kInf;
};

/// Complex trigonometric-polynomial weight g(x) = sum_k c_k e^{i<k,x>}
/// (k = 0 term included), with an optional support mask predicate.
class WeightField {
 public:
  struct Term {
    IVec freq;
    Cplx coeff;
  };

  WeightField() = default;

  static WeightField one(int d) {
    WeightField g;
    g.terms_.push_back({IVec::Zero(d).eval(), Cplx(1.0, 0.0)});
    return g;
  }
  static WeightField constant(int d, Cplx c) {
    WeightField g;
    g.terms_.push_back({IVec::Zero(d).eval(), c});
    return g;
  }

  WeightField& add_mode(IVec freq, Cplx coeff) {
    terms_.push_back({std::move(freq), coeff});
    return *this;
  }
  /// Adds amplitude * cos(<k,x> + phase) as the conjugate mode pair.
  WeightField& add_real_cos(const IVec& freq, Real amplitude, Real phase = 0.0) {
    add_mode(freq, 0.5 * amplitude * std::polar(1.0, phase));
    add_mode((-freq).eval(), 0.5 * amplitude * std::polar(1.0, -phase));
    return *this;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Cplx eval(const Vec& x) const {
    Cplx s(0.0, 0.0);
    for (const Term& t : terms_) {
      const Real phase = t.freq.size() ? t.freq.cast<Real>().dot(x) : 0.0;
      s += t.coeff * std::polar(1.0, phase);
    }
    return s;
  }

  Real sup_abs() const {
    Real s = 0.0;
    for (const Term& t : terms_) s += std::abs(t.coeff);  // upper bound by coefficients
    return s;
  }

  Real sup_abs_sampled(int samples_per_axis, int d) const {
    Real best = 0.0;
    const std::size_t total = static_cast<std::size_t>(ipow(samples_per_axis, d));
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rest = i;
      Vec x(d);
      for (int a = 0; a < d; ++a) {
        x[a] = kTwoPi * static_cast<Real>(rest % samples_per_axis) / samples_per_axis;
        rest /= samples_per_axis;
      }
      best = std::max(best, std::abs(eval(x)));
    }
    return best;
  }

 private:
  std::vector<Term> terms_;
};

/// g^{(m)}(x) = prod_{k=0}^{m-1} g(T^k x).
inline Cplx weight_product(const WeightField& g, const MapModel& map, Vec x, int m) {
  Cplx prod(1.0, 0.0);
  for (int k = 0; k < m; ++k) {
    prod *= g.eval(x);
    x = map.apply(x);
  }
  return prod;
}

}  // namespace coneflow

#endif  // CONEFLOW_MAP_MODEL_HPP
