#ifndef CONEFLOW_DECOMPOSITION_HPP
#define CONEFLOW_DECOMPOSITION_HPP

#include "coneflow/fft.hpp"
#include "coneflow/symbols.hpp"

#include <map>
#include <optional>

namespace coneflow {

/// The image of a function under Q_Theta: the indexed family u_{Theta,n,sigma}
/// for (n,sigma) in Gamma, 0 <= n <= nmax.
struct SpectralBlocks {
  ConeSystem theta;
  int nmax = 0;
  std::map<GammaIndex, GridFunction> blocks;

  const GridFunction& at(GammaIndex g) const { return blocks.at(g); }
  std::vector<GammaIndex> indices() const {
    std::vector<GammaIndex> out;
    out.reserve(blocks.size());
    for (const auto& [g, b] : blocks) out.push_back(g);
    return out;
  }
};

/// psi(D)u for a scalar frequency multiplier: forward transform, pointwise
/// multiply, inverse transform.
template <class Symbol>
GridFunction apply_symbol(Symbol&& symbol, const GridFunction& u) {
  std::vector<Cplx> hat = spectrum(u);
  const FrequencyLattice& lat = u.lattice();
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= symbol(lat.freq(i));
  return synthesize(lat, hat);
}

/// Same, with the multiplier given as precomputed values over the lattice.
inline GridFunction apply_symbol_grid(const std::vector<Real>& symbol, const GridFunction& u) {
  require(symbol.size() == u.size(), "apply_symbol_grid: symbol size mismatch");
  std::vector<Cplx> hat = spectrum(u);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= symbol[i];
  return synthesize(u.lattice(), hat);
}

/// Realizes Q_Theta on a fixed lattice.  Symbol values are evaluated lazily at
/// lattice frequencies and cached per (n,sigma).
class Decomposer {
 public:
  Decomposer(FrequencyLattice lattice, ConeSystem theta, ChiProfile profile = {},
             int nmax = -1)
      : lattice_(std::move(lattice)), theta_(std::move(theta)), profile_(profile) {
    require(theta_.dimension() == lattice_.dimension(), "Decomposer: dimension mismatch");
    nmax_ = nmax >= 0 ? nmax : lattice_.default_nmax();
  }

  const FrequencyLattice& lattice() const { return lattice_; }
  const ConeSystem& theta() const { return theta_; }
  const ChiProfile& profile() const { return profile_; }
  int nmax() const { return nmax_; }

  std::vector<GammaIndex> indices() const {
    std::vector<GammaIndex> out;
    for (int n = 0; n <= nmax_; ++n)
      for (Sign s : {Sign::plus, Sign::minus}) out.push_back({n, s});
    return out;
  }

  /// Cached lattice samples of psi_{Theta,n,sigma}.
  const std::vector<Real>& symbol_values(GammaIndex g) const {
    auto it = cache_.find(g);
    if (it != cache_.end()) return it->second;
    std::vector<Real> vals(lattice_.size());
    for (std::size_t i = 0; i < lattice_.size(); ++i)
      vals[i] = eval_directional(theta_, profile_, g.n, g.sigma, lattice_.freq(i));
    return cache_.emplace(g, std::move(vals)).first->second;
  }

  /// Max deviation of sum_{n<=nmax,sigma} psi_{Theta,n,sigma} from 1 over the
  /// frequency lattice.
  Real partition_deviation() const {
    Real dev = 0.0;
    for (std::size_t i = 0; i < lattice_.size(); ++i) {
      Real s = 0.0;
      for (int n = 0; n <= nmax_; ++n)
        for (Sign sg : {Sign::plus, Sign::minus})
          s += eval_directional(theta_, profile_, n, sg, lattice_.freq(i));
      dev = std::max(dev, std::fabs(s - 1.0));
    }
    return dev;
  }

  /// u_{Theta,n,sigma} = psi_{Theta,n,sigma}(D) u for all indices.  Throws if
  /// the dyadic cover is truncated on this lattice unless explicitly allowed.
  SpectralBlocks decompose(const GridFunction& u, bool allow_truncation = false) const {
    require(u.lattice() == lattice_, "Decomposer: grid mismatch");
    if (!allow_truncation) {
      const Real top = std::ldexp(1.0, nmax_);
      require(top >= lattice_.max_abs_freq(),
              "Decomposer: nmax too small for this lattice; dyadic cover truncated "
              "(pass allow_truncation to proceed)");
    }
    const std::vector<Cplx> hat = spectrum(u);
    SpectralBlocks out;
    out.theta = theta_;
    out.nmax = nmax_;
    std::vector<Cplx> tmp(hat.size());
    for (const GammaIndex& g : indices()) {
      const std::vector<Real>& sym = symbol_values(g);
      for (std::size_t i = 0; i < hat.size(); ++i) tmp[i] = hat[i] * sym[i];
      out.blocks.emplace(g, synthesize(lattice_, tmp));
    }
    return out;
  }

  GridFunction apply(GammaIndex g, const GridFunction& u) const {
    require(u.lattice() == lattice_, "Decomposer: grid mismatch");
    return apply_symbol_grid(symbol_values(g), u);
  }

 private:
  FrequencyLattice lattice_;
  ConeSystem theta_;
  ChiProfile profile_;
  int nmax_ = 0;
  mutable std::map<GammaIndex, std::vector<Real>> cache_;
};

/// Pointwise sum of all blocks.
inline GridFunction reconstruct(const SpectralBlocks& blocks) {
  require(!blocks.blocks.empty(), "reconstruct: no blocks");
  GridFunction out(blocks.blocks.begin()->second.lattice());
  for (const auto& [g, b] : blocks.blocks) out += b;
  return out;
}

/// Distance from every grid point to a support mask, in the box metric.
inline std::vector<Real> distance_field(const FrequencyLattice& lattice,
                                        const std::vector<std::uint8_t>& mask) {
  require(mask.size() == lattice.size(), "distance_field: mask size mismatch");
  std::vector<Vec> support;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) support.push_back(lattice.site(i));
  check_runtime(!support.empty(), "distance_field: empty support");
  std::vector<Real> dist(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const Vec x = lattice.site(i);
    Real best = kInf;
    for (const Vec& s : support) best = std::min(best, lattice.periodic_distance(x, s));
    dist[i] = best;
  }
  return dist;
}

struct DecayBin {
  Real distance = 0.0;  // geometric midpoint of the bin
  Real max_abs = 0.0;
};

/// Max block magnitude binned by distance to the support of u, over
/// logarithmic bins from epsilon to half the box size (Lemma-style rapid
/// decay diagnostic).  `dist` is the precomputed distance field of supp(u).
inline std::vector<DecayBin> pseudolocal_profile(const GridFunction& block,
                                                 const std::vector<Real>& dist,
                                                 Real epsilon, int bins = 16) {
  require(dist.size() == block.size(), "pseudolocal_profile: distance field mismatch");
  require(epsilon > 0.0, "pseudolocal_profile: epsilon must be positive");
  const Real dmax = block.lattice().box_lengths().minCoeff() / 2.0;
  require(dmax > epsilon, "pseudolocal_profile: epsilon beyond half box");
  const Real ratio = std::pow(dmax / epsilon, 1.0 / bins);
  std::vector<DecayBin> out(bins);
  for (int b = 0; b < bins; ++b)
    out[b].distance = epsilon * std::pow(ratio, b + 0.5);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= epsilon || dist[i] > dmax) continue;
    int b = static_cast<int>(std::floor(std::log(dist[i] / epsilon) / std::log(ratio)));
    b = std::clamp(b, 0, bins - 1);
    out[b].max_abs = std::max(out[b].max_abs, std::abs(block[i]));
  }
  return out;
}

/// Least-squares decay exponent b from |u| ~ d^{-b} over bins above the noise
/// floor.  Returns +infinity when everything beyond epsilon is already below
/// the floor (decay too fast to measure).
inline Real fit_decay_exponent(const std::vector<DecayBin>& rows, Real floor = 1e-14) {
  std::vector<std::pair<Real, Real>> pts;
  for (const auto& r : rows)
    if (r.max_abs > floor) pts.emplace_back(std::log(r.distance), std::log(r.max_abs));
  if (pts.size() < 2) return kInf;
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const Real n = static_cast<Real>(pts.size());
  const Real slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

}  // namespace coneflow

#endif  // CONEFLOW_DECOMPOSITION_HPP
