#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <new>

#include "uimvdr/error.hpp"

namespace uimvdr::detail {

namespace {
// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  require(n > 0, ErrorKind::kInvalidArgument, "fft length must be positive");
  std::lock_guard<std::mutex> lock(planner_mutex());
  real_ = fftw_alloc_real(n_);
  spec_ = fftw_alloc_complex(bins());
  if (real_ == nullptr || spec_ == nullptr) {
    fftw_free(real_);
    fftw_free(spec_);
    throw std::bad_alloc();
  }
  const int len = static_cast<int>(n_);
  forward_plan_ = fftw_plan_dft_r2c_1d(len, real_, spec_, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(len, spec_, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(forward_plan_);
  fftw_destroy_plan(inverse_plan_);
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  const std::size_t m = std::min(in.size(), n_);
  std::copy_n(in.begin(), m, real_);
  std::fill(real_ + m, real_ + n_, 0.0);
  fftw_execute(forward_plan_);
  const std::size_t nb = std::min(out.size(), bins());
  for (std::size_t k = 0; k < nb; ++k) out[k] = {spec_[k][0], spec_[k][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  const std::size_t nb = bins();
  for (std::size_t k = 0; k < nb; ++k) {
    const auto v = k < in.size() ? in[k] : std::complex<double>{};
    spec_[k][0] = v.real();
    spec_[k][1] = v.imag();
  }
  // c2r destroys its input; the spectrum buffer is refilled on every call.
  fftw_execute(inverse_plan_);
  std::copy_n(real_, std::min(out.size(), n_), out.begin());
}

std::size_t good_fft_size(std::size_t n) {
  std::size_t best = 1;
  while (best < n) best *= 2;
  for (std::size_t p5 = 1; p5 <= best; p5 *= 5) {
    for (std::size_t p3 = p5; p3 <= best; p3 *= 3) {
      std::size_t v = p3;
      while (v < n) v *= 2;
      best = std::min(best, v);
    }
  }
  return best;
}

}  // namespace uimvdr::detail
