#include "coneflow/decomposition.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace coneflow;
using Catch::Approx;

namespace {

GridFunction random_band_limited(const FrequencyLattice& lat, std::int64_t kmax, Rng& rng) {
  std::vector<Cplx> hat(lat.size(), Cplx(0, 0));
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const IVec k = lat.freq_int(i);
    if (lat.freq_of(k).norm() <= static_cast<Real>(kmax)) hat[i] = rng.cgaussian();
  }
  return synthesize(lat, hat);
}

Real rel_l2_error(const GridFunction& a, const GridFunction& b) {
  GridFunction d = a;
  d -= b;
  const Real na = a.l2_norm();
  return na == 0.0 ? d.l2_norm() : d.l2_norm() / na;
}

}  // namespace

TEST_CASE("apply_symbol: identity, single-shell projection") {
  const FrequencyLattice lat(2, 64);
  Rng rng(1);
  const GridFunction u = random_band_limited(lat, 20, rng);

  const GridFunction same = apply_symbol([](const Vec&) { return 1.0; }, u);
  CHECK(rel_l2_error(same, u) < 1e-13);

  ChiProfile chi;
  auto psi2 = [&](const Vec& xi) { return eval_shell(chi, ShellKind::psi, 2, xi); };
  const GridFunction c4 =
      GridFunction::sampled(lat, [](const Vec& x) { return std::cos(4.0 * x[0]); });
  // |xi| = 4 lies solely in shell 2
  CHECK(rel_l2_error(apply_symbol(psi2, c4), c4) < 1e-13);
  const GridFunction c1 =
      GridFunction::sampled(lat, [](const Vec& x) { return std::cos(x[0]); });
  CHECK(apply_symbol(psi2, c1).linf_norm() < 1e-13);
}

TEST_CASE("decompose: zero input, pure mode lands in its cone block") {
  const FrequencyLattice lat(2, 64);
  // C- contains the e1 axis
  const ConeSystem theta = ConeSystem::planar(kPi / 2.0, 0.5, 0.0, 0.5);
  const Decomposer dec(lat, theta);

  const SpectralBlocks zero = dec.decompose(GridFunction(lat));
  for (const auto& [g, b] : zero.blocks) CHECK(b.linf_norm() == 0.0);

  const GridFunction c4 =
      GridFunction::sampled(lat, [](const Vec& x) { return std::cos(4.0 * x[0]); });
  const SpectralBlocks blocks = dec.decompose(c4);
  CHECK(rel_l2_error(blocks.at({2, Sign::minus}), c4) < 1e-12);
  CHECK(blocks.at({2, Sign::plus}).linf_norm() < 1e-13);
  CHECK(blocks.at({0, Sign::plus}).linf_norm() < 1e-13);
  CHECK(blocks.at({0, Sign::minus}).linf_norm() < 1e-13);
}

TEST_CASE("reconstruction is exact on band-limited functions") {
  const FrequencyLattice lat(2, 64);
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  const Decomposer dec(lat, theta);
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const GridFunction u = random_band_limited(lat, 30, rng);
    const GridFunction back = reconstruct(dec.decompose(u));
    CHECK(rel_l2_error(back, u) < 1e-10);
  }
  // single nonzero block reconstructs to itself
  const GridFunction c4 =
      GridFunction::sampled(lat, [](const Vec& x) { return std::cos(4.0 * x[0]); });
  SpectralBlocks single;
  single.theta = theta;
  single.nmax = 2;
  single.blocks.emplace(GammaIndex{2, Sign::minus}, c4);
  CHECK(rel_l2_error(reconstruct(single), c4) < 1e-14);
}

TEST_CASE("decompose-reconstruct is linear") {
  const FrequencyLattice lat(2, 32);
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  const Decomposer dec(lat, theta);
  Rng rng(4);
  const GridFunction u = random_band_limited(lat, 10, rng);
  const GridFunction v = random_band_limited(lat, 10, rng);
  const SpectralBlocks bu = dec.decompose(u);
  const SpectralBlocks bv = dec.decompose(v);
  const SpectralBlocks bsum = dec.decompose(u + v);
  const Real scale = (u + v).l2_norm();
  for (const auto& [g, b] : bsum.blocks) {
    GridFunction direct = bu.at(g);
    direct += bv.at(g);
    direct -= b;
    CHECK(direct.l2_norm() < 1e-11 * scale);
  }
}

TEST_CASE("idempotence: re-decomposing a block concentrates on overlapping shells") {
  const FrequencyLattice lat(2, 64);
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  const Decomposer dec(lat, theta);
  Rng rng(6);
  const GridFunction u = random_band_limited(lat, 25, rng);
  const GridFunction block = dec.decompose(u).at({3, Sign::plus});
  const SpectralBlocks twice = dec.decompose(block);
  const Real scale = block.linf_norm();
  for (const auto& [g, b] : twice.blocks) {
    // supp psi_3 = [4,16]; shells with disjoint support must vanish
    if (g.n <= 1 || g.n >= 6) CHECK(b.linf_norm() <= 1e-12 * std::max(scale, 1.0));
  }
}

TEST_CASE("partition of unity holds on the full frequency lattice") {
  const FrequencyLattice lat(2, 64);
  const ConeSystem theta = ConeSystem::axis_aligned(0.6, 0.6);
  const Decomposer dec(lat, theta);
  CHECK(dec.partition_deviation() <= 1e-12);
}

TEST_CASE("truncated dyadic cover is flagged, not silent") {
  const FrequencyLattice lat(2, 64);
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  const Decomposer small(lat, theta, ChiProfile{}, 3);
  Rng rng(8);
  const GridFunction u = random_band_limited(lat, 30, rng);
  CHECK_THROWS_AS(small.decompose(u), std::invalid_argument);
  CHECK_NOTHROW(small.decompose(u, /*allow_truncation=*/true));
}

TEST_CASE("Young-type contraction: kernel L1 bounds the operator on L2 and Linf") {
  const FrequencyLattice lat(2, 64);
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  const Decomposer dec(lat, theta);
  Rng rng(9);
  const GridFunction u = random_band_limited(lat, 28, rng);
  for (const GammaIndex g : {GammaIndex{0, Sign::plus}, GammaIndex{2, Sign::minus},
                             GammaIndex{4, Sign::plus}}) {
    // discrete convolution kernel of the block multiplier
    std::vector<Cplx> sym(lat.size());
    const auto& vals = dec.symbol_values(g);
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = vals[i];
    const GridFunction kernel = synthesize(lat, sym);
    Real l1 = 0.0;
    for (std::size_t i = 0; i < kernel.size(); ++i) l1 += std::abs(kernel[i]);
    l1 /= static_cast<Real>(lat.size());
    const GridFunction bu = dec.apply(g, u);
    CHECK(bu.lt_norm(kInf) <= l1 * u.lt_norm(kInf) * (1.0 + 1e-12));
    CHECK(bu.lt_norm(2.0) <= l1 * u.lt_norm(2.0) * (1.0 + 1e-12));
  }
}

TEST_CASE("kernel L1 norms are uniform across fully resolved shells") {
  const FrequencyLattice lat(2, 128);
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  const Decomposer dec(lat, theta);
  Real lo = kInf, hi = 0.0;
  // shells fully inside the lattice: 2^{n+1} <= N/2
  for (int n = 0; n <= 5; ++n) {
    for (Sign s : {Sign::plus, Sign::minus}) {
      std::vector<Cplx> sym(lat.size());
      const auto& vals = dec.symbol_values({n, s});
      for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = vals[i];
      const GridFunction kernel = synthesize(lat, sym);
      Real l1 = 0.0;
      for (std::size_t i = 0; i < kernel.size(); ++i) l1 += std::abs(kernel[i]);
      l1 /= static_cast<Real>(lat.size());
      lo = std::min(lo, l1);
      hi = std::max(hi, l1);
    }
  }
  CHECK(hi / lo < 20.0);
}

TEST_CASE("pseudolocal decay of blocks away from the support") {
  // padded box: the R^d model embedded with zero padding well beyond the
  // support diameter, so the measured window reaches into the kernel tails
  const Real box = 8.0 * kTwoPi;
  const FrequencyLattice lat(2, 2048, box);
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  const Decomposer dec(lat, theta);
  Vec center(2);
  center << box / 2.0, box / 2.0;
  const Real radius = box / 128.0;
  const GridFunction bump = smooth_bump(lat, center, radius);
  // exact distance to the disk support
  std::vector<Real> dist(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i)
    dist[i] = std::max(0.0, lat.periodic_distance(lat.site(i), center) - radius);

  const std::vector<Cplx> hat = spectrum(bump);
  const Real eps = box / 8.0;
  std::vector<Cplx> tmp(hat.size());
  for (const GammaIndex g :
       {GammaIndex{0, Sign::plus}, GammaIndex{1, Sign::minus}, GammaIndex{4, Sign::plus}}) {
    for (std::size_t i = 0; i < hat.size(); ++i)
      tmp[i] = hat[i] * eval_directional(theta, dec.profile(), g.n, g.sigma, lat.freq(i));
    const GridFunction block = synthesize(lat, tmp);
    const auto profile = pseudolocal_profile(block, dist, eps);
    const Real b = fit_decay_exponent(profile);
    INFO("block " << to_string(g));
    CHECK(b >= 4.0);
  }
}

TEST_CASE("blocks match the direct convolution oracle; zero input stays zero") {
  const FrequencyLattice lat(2, 128);
  const ConeSystem theta = ConeSystem::axis_aligned(0.5, 0.5);
  const Decomposer dec(lat, theta);
  Vec center(2);
  center << kPi, kPi;
  const Real radius = kPi / 8.0;
  const GridFunction bump = smooth_bump(lat, center, radius);
  std::vector<std::uint8_t> mask(lat.size(), 0);
  for (std::size_t i = 0; i < lat.size(); ++i)
    mask[i] = lat.periodic_distance(lat.site(i), center) <= radius ? 1 : 0;
  const std::vector<Real> dist = distance_field(lat, mask);
  const SpectralBlocks blocks = dec.decompose(bump);

  const GammaIndex g{4, Sign::minus};
  std::vector<Cplx> sym(lat.size());
  const auto& vals = dec.symbol_values(g);
  for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = vals[i];
  const GridFunction kernel = synthesize(lat, sym);
  const GridFunction& block = blocks.at(g);
  Rng rng(10);
  IVec bi(2), bj(2);
  for (int probe = 0; probe < 12; ++probe) {
    const std::size_t i = rng.integer(lat.size());
    lat.unrank(i, bi);
    Cplx direct(0.0, 0.0);
    for (std::size_t j = 0; j < lat.size(); ++j) {
      lat.unrank(j, bj);
      direct += kernel[lat.rank(bi - bj)] * bump[j];
    }
    direct /= static_cast<Real>(lat.size());
    CHECK(std::abs(direct - block[i]) < 1e-11);
  }

  // zero input gives an all-zero profile
  const Real eps = kTwoPi / 8.0;
  const SpectralBlocks zero = dec.decompose(GridFunction(lat));
  for (const auto& bin : pseudolocal_profile(zero.at(g), dist, eps))
    CHECK(bin.max_abs == 0.0);
}

TEST_CASE("pseudolocal profile rejects an empty support") {
  const FrequencyLattice lat(2, 32);
  std::vector<std::uint8_t> empty(lat.size(), 0);
  CHECK_THROWS_AS(distance_field(lat, empty), std::runtime_error);
}
