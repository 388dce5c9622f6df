#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace uimvdr::detail {

// Real-to-complex transform of a fixed length. Owns its FFTW buffers and
// plans; not shareable across threads, cheap enough to build per call.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // Unnormalised forward transform; `in` shorter than n is zero-padded.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  // Unnormalised inverse (no 1/n factor).
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_plan_ = nullptr;
  fftw_plan inverse_plan_ = nullptr;
};

// Smallest 2^a 3^b 5^c >= n.
std::size_t good_fft_size(std::size_t n);

}  // namespace uimvdr::detail
