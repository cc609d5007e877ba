#ifndef CONEFLOW_GRID_FUNCTION_HPP
#define CONEFLOW_GRID_FUNCTION_HPP

#include "coneflow/lattice.hpp"

#include <algorithm>
#include <functional>
#include <utility>

namespace coneflow {

/// Complex-valued samples on a FrequencyLattice grid, optionally carrying a
/// support mask (the compact set K of the continuum model).
class GridFunction {
 public:
  GridFunction() = default;

  explicit GridFunction(FrequencyLattice lattice)
      : lattice_(std::move(lattice)), values_(lattice_.size(), Cplx(0.0, 0.0)) {}

  GridFunction(FrequencyLattice lattice, std::vector<Cplx> values)
      : lattice_(std::move(lattice)), values_(std::move(values)) {
    require(values_.size() == lattice_.size(), "GridFunction: value count != N^d");
  }

  template <class F>
  static GridFunction sampled(const FrequencyLattice& lattice, F&& f) {
    GridFunction g(lattice);
    for (std::size_t i = 0; i < lattice.size(); ++i) g.values_[i] = Cplx(f(lattice.site(i)));
    return g;
  }

  /// Pure Fourier mode e_k(x) = exp(i <xi_k, x>).
  static GridFunction mode(const FrequencyLattice& lattice, const IVec& k) {
    GridFunction g(lattice);
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      const Real phase = lattice.freq_of(k).dot(lattice.site(i));
      g.values_[i] = std::polar(1.0, phase);
    }
    return g;
  }

  const FrequencyLattice& lattice() const { return lattice_; }
  std::vector<Cplx>& values() { return values_; }
  const std::vector<Cplx>& values() const { return values_; }
  Cplx& operator[](std::size_t i) { return values_[i]; }
  const Cplx& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  void set_support_mask(std::vector<std::uint8_t> mask, Real tol = 1e-12) {
    require(mask.size() == values_.size(), "GridFunction: mask size mismatch");
    Real off = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      scale = std::max(scale, std::abs(values_[i]));
      if (!mask[i]) off = std::max(off, std::abs(values_[i]));
    }
    check_runtime(off <= tol * std::max(scale, 1.0),
                  "GridFunction: values do not vanish off the declared support");
    mask_ = std::move(mask);
  }
  bool has_mask() const { return !mask_.empty(); }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  GridFunction& operator+=(const GridFunction& o) {
    require(lattice_ == o.lattice_, "GridFunction: lattice mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    require(lattice_ == o.lattice_, "GridFunction: lattice mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  GridFunction& operator*=(Cplx c) {
    for (auto& v : values_) v *= c;
    return *this;
  }
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(Cplx c, GridFunction a) { return a *= c; }

  GridFunction& pointwise_multiply(const GridFunction& o) {
    require(lattice_ == o.lattice_, "GridFunction: lattice mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
    return *this;
  }

  Real linf_norm() const {
    Real m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// L^t norm by Riemann sum over grid cells; `normalized` divides the measure
  /// by the box volume (probability measure on the torus).  t = infinity is
  /// the max over grid points.
  Real lt_norm(Real t, bool normalized = true) const {
    if (std::isinf(t)) return linf_norm();
    require(t >= 1.0, "lt_norm: t must be >= 1 or infinity");
    const Real w = normalized ? 1.0 / static_cast<Real>(values_.size())
                              : lattice_.cell_volume();
    Real s = 0.0;
    for (const auto& v : values_) s += std::pow(std::abs(v), t);
    return std::pow(w * s, 1.0 / t);
  }
  Real l2_norm(bool normalized = true) const { return lt_norm(2.0, normalized); }

  /// Bilinear pairing  integral of f*g (no conjugation), Riemann sum.
  Cplx pair(const GridFunction& o, bool normalized = true) const {
    require(lattice_ == o.lattice_, "GridFunction: lattice mismatch");
    const Real w = normalized ? 1.0 / static_cast<Real>(values_.size())
                              : lattice_.cell_volume();
    Cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * o.values_[i];
    return w * s;
  }

  Cplx mean() const {
    Cplx s(0.0, 0.0);
    for (const auto& v : values_) s += v;
    return s / static_cast<Real>(values_.size());
  }

 private:
  FrequencyLattice lattice_;
  std::vector<Cplx> values_;
  std::vector<std::uint8_t> mask_;
};

/// Smooth radial bump exp(-1/(1-(r/radius)^2)) centered at a point, zero
/// outside radius; used as the compactly supported test function.
inline GridFunction smooth_bump(const FrequencyLattice& lattice, const Vec& center,
                                Real radius, Real amplitude = 1.0) {
  return GridFunction::sampled(lattice, [&](const Vec& x) {
    const Real r = lattice.periodic_distance(x, center) / radius;
    if (r >= 1.0) return 0.0;
    return amplitude * std::exp(-1.0 / (1.0 - r * r)) * std::exp(1.0);
  });
}

}  // namespace coneflow

#endif  // CONEFLOW_GRID_FUNCTION_HPP
