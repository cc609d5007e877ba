#ifndef CONEFLOW_LATTICE_HPP
#define CONEFLOW_LATTICE_HPP

#include "coneflow/common.hpp"

namespace coneflow {

/// Uniform periodic grid on a d-dimensional box together with its discrete
/// frequency lattice.  Grid sites are x_i = (L/N) i, i in [0,N)^d; frequencies
/// are xi = (2 pi / L) k with integer k in the symmetric range (-N/2, N/2]
/// (the Nyquist index N/2 sits on the positive side).  Storage is row-major.
class FrequencyLattice {
 public:
  FrequencyLattice() = default;

  FrequencyLattice(int d, int n_per_axis, Real box_length = kTwoPi)
      : FrequencyLattice(d, n_per_axis, Vec::Constant(d, box_length)) {}

  FrequencyLattice(int d, int n_per_axis, Vec box_lengths)
      : d_(d), n_(n_per_axis), box_(std::move(box_lengths)) {
    require(d >= 1 && d <= kMaxDim, "FrequencyLattice: dimension out of range");
    require(n_ >= 2 && n_ % 2 == 0, "FrequencyLattice: grid size must be even and >= 2");
    require(box_.size() == d_, "FrequencyLattice: box length dimension mismatch");
    for (int a = 0; a < d_; ++a) require(box_[a] > 0.0, "FrequencyLattice: box length <= 0");
    size_ = 1;
    for (int a = 0; a < d_; ++a) size_ *= static_cast<std::size_t>(n_);
  }

  int dimension() const { return d_; }
  int grid_size() const { return n_; }
  const Vec& box_lengths() const { return box_; }
  std::size_t size() const { return size_; }

  Real cell_volume() const {
    Real v = 1.0;
    for (int a = 0; a < d_; ++a) v *= box_[a] / n_;
    return v;
  }
  Real box_volume() const {
    Real v = 1.0;
    for (int a = 0; a < d_; ++a) v *= box_[a];
    return v;
  }

  void unrank(std::size_t flat, IVec& idx) const {
    idx.resize(d_);
    for (int a = d_ - 1; a >= 0; --a) {
      idx[a] = static_cast<std::int64_t>(flat % n_);
      flat /= n_;
    }
  }
  std::size_t rank(const IVec& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < d_; ++a) {
      std::int64_t i = idx[a] % n_;
      if (i < 0) i += n_;
      flat = flat * n_ + static_cast<std::size_t>(i);
    }
    return flat;
  }

  /// Integer frequency of a grid index along one axis: k in (-N/2, N/2].
  std::int64_t axis_freq(std::int64_t idx) const {
    return idx <= n_ / 2 ? idx : idx - n_;
  }

  IVec freq_int(std::size_t flat) const {
    IVec idx;
    unrank(flat, idx);
    for (int a = 0; a < d_; ++a) idx[a] = axis_freq(idx[a]);
    return idx;
  }

  /// Scaled frequency xi = (2 pi / L) k.
  Vec freq(std::size_t flat) const {
    const IVec k = freq_int(flat);
    Vec xi(d_);
    for (int a = 0; a < d_; ++a) xi[a] = kTwoPi / box_[a] * static_cast<Real>(k[a]);
    return xi;
  }

  Vec freq_of(const IVec& k) const {
    Vec xi(d_);
    for (int a = 0; a < d_; ++a) xi[a] = kTwoPi / box_[a] * static_cast<Real>(k[a]);
    return xi;
  }

  /// Flat index of the integer frequency k, or npos when k falls outside the
  /// symmetric range (the mode is unresolved on this lattice).
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t mode_index(const IVec& k) const {
    std::size_t flat = 0;
    for (int a = 0; a < d_; ++a) {
      if (k[a] > n_ / 2 || k[a] <= -n_ / 2) return npos;
      const std::int64_t i = k[a] >= 0 ? k[a] : k[a] + n_;
      flat = flat * n_ + static_cast<std::size_t>(i);
    }
    return flat;
  }

  Vec site(std::size_t flat) const {
    IVec idx;
    unrank(flat, idx);
    Vec x(d_);
    for (int a = 0; a < d_; ++a) x[a] = box_[a] / n_ * static_cast<Real>(idx[a]);
    return x;
  }

  /// Largest |xi| on the lattice (attained at the all-Nyquist corner).
  Real max_abs_freq() const {
    Real s = 0.0;
    for (int a = 0; a < d_; ++a) {
      const Real m = kTwoPi / box_[a] * (n_ / 2);
      s += m * m;
    }
    return std::sqrt(s);
  }

  /// Smallest n with 2^{n-1} strictly above every lattice frequency, so the
  /// dyadic cover {psi_n, n <= nmax} is complete with one spare shell.
  int default_nmax() const {
    const Real m = max_abs_freq();
    int n = 0;
    while (std::ldexp(1.0, n - 1) <= m) ++n;
    return n;
  }

  Vec wrap(Vec x) const {
    for (int a = 0; a < d_; ++a) {
      x[a] = std::fmod(x[a], box_[a]);
      if (x[a] < 0.0) x[a] += box_[a];
    }
    return x;
  }

  /// Distance in the box metric (shortest periodic representative).
  Real periodic_distance(const Vec& x, const Vec& y) const {
    Real s = 0.0;
    for (int a = 0; a < d_; ++a) {
      Real dd = std::fabs(x[a] - y[a]);
      dd = std::fmod(dd, box_[a]);
      if (dd > box_[a] / 2.0) dd = box_[a] - dd;
      s += dd * dd;
    }
    return std::sqrt(s);
  }

  bool operator==(const FrequencyLattice& o) const {
    return d_ == o.d_ && n_ == o.n_ && box_ == o.box_;
  }
  bool operator!=(const FrequencyLattice& o) const { return !(*this == o); }

 private:
  int d_ = 0;
  int n_ = 0;
  Vec box_;
  std::size_t size_ = 0;
};

}  // namespace coneflow

#endif  // CONEFLOW_LATTICE_HPP
