#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uimvdr/masking.hpp"
#include "uimvdr/stft.hpp"

namespace uimvdr {

// Per-frequency spatial covariance matrices [bins x C x C], row-major per
// slice. Hermitian PSD by construction when built from channel snapshots.
class Scm {
 public:
  Scm(std::size_t bins, std::size_t channels);

  std::size_t bins() const { return bins_; }
  std::size_t channels() const { return channels_; }

  Complex& at(std::size_t f, std::size_t i, std::size_t j) {
    return data_[(f * channels_ + i) * channels_ + j];
  }
  const Complex& at(std::size_t f, std::size_t i, std::size_t j) const {
    return data_[(f * channels_ + i) * channels_ + j];
  }
  std::span<Complex> slice(std::size_t f) {
    return std::span<Complex>(data_).subspan(f * channels_ * channels_,
                                             channels_ * channels_);
  }
  std::span<const Complex> slice(std::size_t f) const {
    return std::span<const Complex>(data_).subspan(f * channels_ * channels_,
                                                   channels_ * channels_);
  }
  Complex trace(std::size_t f) const;

  Scm& operator*=(double scale);

 private:
  std::size_t bins_;
  std::size_t channels_;
  std::vector<Complex> data_;
};

struct BeamformConfig {
  std::size_t ref_mic = 0;
  // Loading added to the noise SCM, relative to trace(phi_nn) / C.
  double diagonal_loading = 1e-6;
  double postmask_floor = 0.3;
  bool postmask_enabled = true;

  void validate() const;
};

// Filter F(f) per bin; the beamformed output is F(f)^H Y(t, f).
struct BeamformerWeights {
  std::size_t bins = 0;
  std::size_t channels = 0;
  std::size_t ref_mic = 0;
  std::vector<Complex> weights;  // [bins x channels]

  std::span<const Complex> at(std::size_t f) const {
    return std::span<const Complex>(weights).subspan(f * channels, channels);
  }

  // One-hot filter selecting `ref_mic` in every bin.
  static BeamformerWeights pass_through(std::size_t bins, std::size_t channels,
                                        std::size_t ref_mic);
};

// (1/T) sum_t X(t,f) X(t,f)^H.
Scm scm_target(const ComplexSpectrogram& xhat);
// Same averaging applied to Y - X_hat.
Scm scm_noise(const ComplexSpectrogram& mixture, const ComplexSpectrogram& xhat);

// Souden MVDR: (phi_nn + eps I)^-1 phi_xx u / trace((phi_nn + eps I)^-1 phi_xx)
// with eps = diagonal_loading * trace(phi_nn) / C. Bins whose trace is below
// 1e-12 * C, or whose loaded noise SCM is singular, get the one-hot filter.
BeamformerWeights mvdr_weights(const Scm& phi_xx, const Scm& phi_nn,
                               const BeamformConfig& cfg);

// X_bar(t, f) = F(f)^H Y(t, f); single-channel output.
ComplexSpectrogram mvdr_apply(const BeamformerWeights& weights,
                              const ComplexSpectrogram& mixture);

// max(M(t, f), floor) * X_bar(t, f).
ComplexSpectrogram post_mask(const ComplexSpectrogram& beamformed,
                             const Mask& mask, double floor);

}  // namespace uimvdr
