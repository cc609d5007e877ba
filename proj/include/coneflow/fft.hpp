#ifndef CONEFLOW_FFT_HPP
#define CONEFLOW_FFT_HPP

#include "coneflow/grid_function.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace coneflow {
namespace detail {

/// Process-lifetime cache of FFTW plans (FFTW_ESTIMATE | FFTW_UNALIGNED, so
/// plans are deterministic and valid for any array via new-array execute).
/// Plan creation is serialized; execution is thread-safe.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans p;
    return p;
  }

  fftw_plan get(const std::vector<int>& dims, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(dims, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int n : dims) total *= static_cast<std::size_t>(n);
    std::vector<Cplx> in(total), out(total);
    fftw_plan plan = fftw_plan_dft(
        static_cast<int>(dims.size()), dims.data(),
        reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()),
        sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    check_runtime(plan != nullptr, "FFTW plan creation failed");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  FftPlans() = default;
  std::mutex mutex_;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans_;
};

inline void execute(const std::vector<int>& dims, int sign, const Cplx* in, Cplx* out) {
  fftw_plan plan = FftPlans::instance().get(dims, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

inline std::vector<int> dims_of(const FrequencyLattice& lattice) {
  return std::vector<int>(lattice.dimension(), lattice.grid_size());
}

}  // namespace detail

/// Fourier coefficients of u: hat_u[k] with u(x) = sum_k hat_u[k] e^{i xi_k x}.
/// Indexed by the lattice's flat ordering (use mode_index to address modes).
inline std::vector<Cplx> spectrum(const GridFunction& u) {
  std::vector<Cplx> out(u.size());
  detail::execute(detail::dims_of(u.lattice()), FFTW_FORWARD, u.values().data(), out.data());
  const Real scale = 1.0 / static_cast<Real>(u.size());
  for (auto& c : out) c *= scale;
  return out;
}

/// Inverse of `spectrum`.
inline GridFunction synthesize(const FrequencyLattice& lattice, const std::vector<Cplx>& coeffs) {
  require(coeffs.size() == lattice.size(), "synthesize: coefficient count mismatch");
  GridFunction u(lattice);
  detail::execute(detail::dims_of(lattice), FFTW_BACKWARD, coeffs.data(), u.values().data());
  return u;
}

/// l2 norm of a coefficient vector; by Parseval this equals the normalized
/// L2 norm of the synthesized grid function.
inline Real coeff_l2(const std::vector<Cplx>& coeffs) {
  Real s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace coneflow

#endif  // CONEFLOW_FFT_HPP
