#pragma once

// Thin RAII layer over FFTW3 (double precision).

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <fftw3.h>

namespace qmwp::fft {

namespace detail {
struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;
}  // namespace detail

/// Unnormalized forward DFT of a real sequence; returns the n/2 + 1
/// non-negative-frequency coefficients.
inline std::vector<std::complex<double>> rfft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::unique_ptr<double, detail::FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, detail::FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
  detail::Plan plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute(plan.get());
  std::vector<std::complex<double>> res(n / 2 + 1);
  for (std::size_t k = 0; k < res.size(); ++k) res[k] = {out.get()[k][0], out.get()[k][1]};
  return res;
}

/// Unnormalized complex DFT; sign = FFTW_FORWARD or FFTW_BACKWARD.
inline std::vector<std::complex<double>> cfft(std::span<const std::complex<double>> x, int sign) {
  const std::size_t n = x.size();
  std::unique_ptr<fftw_complex, detail::FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  detail::Plan plan(fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), sign, FFTW_ESTIMATE));
  for (std::size_t k = 0; k < n; ++k) {
    buf.get()[k][0] = x[k].real();
    buf.get()[k][1] = x[k].imag();
  }
  fftw_execute(plan.get());
  std::vector<std::complex<double>> res(n);
  for (std::size_t k = 0; k < n; ++k) res[k] = {buf.get()[k][0], buf.get()[k][1]};
  return res;
}

constexpr std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace qmwp::fft
