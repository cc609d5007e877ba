#ifndef CONEFLOW_COMMON_HPP
#define CONEFLOW_COMMON_HPP

#include <Eigen/Dense>

#include <complex>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace coneflow {

using Real = double;
using Cplx = std::complex<double>;

// Spatial dimension is small (2 or 3 in practice); vectors and matrices are
// stack-allocated with capacity kMaxDim.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using IVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using IMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Real kPi = 3.14159265358979323846;
inline constexpr Real kTwoPi = 2.0 * kPi;
inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

enum class Sign : int { plus = 1, minus = -1 };

inline Sign other(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

/// Index set Gamma = {(n, sigma)}: dyadic shell index paired with a cone sign.
struct GammaIndex {
  int n = 0;
  Sign sigma = Sign::plus;

  friend bool operator==(const GammaIndex&, const GammaIndex&) = default;
  friend bool operator<(const GammaIndex& a, const GammaIndex& b) {
    if (a.n != b.n) return a.n < b.n;
    return static_cast<int>(a.sigma) < static_cast<int>(b.sigma);
  }
};

inline std::string to_string(const GammaIndex& g) {
  return "(" + std::to_string(g.n) + "," + sign_char(g.sigma) + ")";
}

inline Real pow2(Real e) { return std::exp2(e); }

inline std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

/// Deterministic RNG used by every probe-based routine; never seeded from
/// entropy sources so runs are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  Real uniform(Real a = 0.0, Real b = 1.0) {
    return a + (b - a) * std::generate_canonical<Real, 53>(gen_);
  }
  /// Standard normal via Box-Muller (avoids libstdc++-specific distributions).
  Real gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Real u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform();
    const Real u2 = uniform();
    const Real r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }
  Cplx cgaussian() { return Cplx(gaussian(), gaussian()) / std::sqrt(2.0); }
  std::uint64_t integer(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  Real spare_ = 0.0;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void check_runtime(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

}  // namespace coneflow

#endif  // CONEFLOW_COMMON_HPP
