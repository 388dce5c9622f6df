#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "uimvdr/stft.hpp"

namespace uimvdr {

// Real time-frequency gain [frames x bins], every entry in [0, 1].
class Mask {
 public:
  Mask(std::size_t frames, std::size_t bins, double fill = 0.0);
  // Validates range and size.
  Mask(std::size_t frames, std::size_t bins, std::vector<double> values);

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }

  double operator()(std::size_t t, std::size_t f) const {
    return values_[t * bins_ + f];
  }
  // Assigns with range check.
  void set(std::size_t t, std::size_t f, double value);
  std::span<const double> values() const { return values_; }

  bool matches(const ComplexSpectrogram& spec) const {
    return frames_ == spec.frames() && bins_ == spec.bins();
  }

 private:
  std::size_t frames_;
  std::size_t bins_;
  std::vector<double> values_;
};

// X_hat(t, f, c) = M(t, f) * Y(t, f, c) for every channel.
ComplexSpectrogram apply_mask(const ComplexSpectrogram& spec, const Mask& mask);

// |X|^p / (|X|^p + |Y - X|^p) on channel `channel` of both inputs, 0/0 -> 0.
Mask oracle_wiener_mask(const ComplexSpectrogram& target,
                        const ComplexSpectrogram& mixture, double exponent,
                        std::size_t channel = 0);

// 1 where 20 log10(|X| / |N|) > threshold_db (strict), else 0.
Mask oracle_binary_mask(const ComplexSpectrogram& target,
                        const ComplexSpectrogram& noise, double threshold_db,
                        std::size_t channel = 0);

// Stand-ins for the separation network.
struct OracleWienerMask {
  double exponent = 2.0;
};
struct OracleBinaryMask {
  double threshold_db = 0.0;
};
// Mask supplied from outside (typically layer 0 of a mask tensor file).
struct ExternalMask {
  Mask mask;
};
struct UnitMask {};

using MaskProvider =
    std::variant<OracleWienerMask, OracleBinaryMask, ExternalMask, UnitMask>;

void validate(const MaskProvider& provider);
bool needs_target(const MaskProvider& provider);

// Computes the mask for `mixture` on channel `ref`. Oracle providers need
// `target`, the ground-truth target image at every microphone (or at least
// at `ref`).
Mask resolve_mask(const MaskProvider& provider,
                  const ComplexSpectrogram& mixture,
                  const ComplexSpectrogram* target, std::size_t ref);

}  // namespace uimvdr
