#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "uimvdr/waveform.hpp"

namespace uimvdr {

using Complex = std::complex<double>;

enum class Window { kSqrtHann, kRectangular };
enum class Padding { kReflect, kNone };

// Framing parameters. Construction validates 0 < hop <= window <= fft and the
// constant-overlap-add condition on the squared taper, so every instance
// admits perfect reconstruction away from the signal edges.
class StftConfig {
 public:
  static StftConfig make(std::size_t window_len, std::size_t hop_len,
                         std::size_t fft_len, Window window = Window::kSqrtHann,
                         Padding padding = Padding::kReflect);
  // Window of `window_ms` rounded to samples, 50% overlap, fft = window.
  static StftConfig from_ms(double window_ms, int sample_rate,
                            Padding padding = Padding::kReflect);
  // 1024-sample (64 ms at 16 kHz) square-root Hann, hop 512.
  static StftConfig standard();

  std::size_t window_len() const { return window_len_; }
  std::size_t hop_len() const { return hop_len_; }
  std::size_t fft_len() const { return fft_len_; }
  std::size_t num_bins() const { return fft_len_ / 2 + 1; }
  Window window() const { return window_; }
  Padding padding() const { return padding_; }

  // Periodic taper, used for both analysis and synthesis.
  const std::vector<double>& taper() const { return taper_; }
  // Sum of squared shifted tapers in the fully overlapped region.
  double overlap_gain() const { return overlap_gain_; }

  // Frames produced for a signal of `samples` samples.
  std::size_t num_frames(std::size_t samples) const;
  // Left padding applied before framing.
  std::size_t left_pad() const;

  friend bool operator==(const StftConfig& a, const StftConfig& b) {
    return a.window_len_ == b.window_len_ && a.hop_len_ == b.hop_len_ &&
           a.fft_len_ == b.fft_len_ && a.window_ == b.window_ &&
           a.padding_ == b.padding_;
  }

 private:
  StftConfig() = default;

  std::size_t window_len_ = 0;
  std::size_t hop_len_ = 0;
  std::size_t fft_len_ = 0;
  Window window_ = Window::kSqrtHann;
  Padding padding_ = Padding::kReflect;
  std::vector<double> taper_;
  double overlap_gain_ = 1.0;
};

// Complex tensor [frames x bins x channels]. Forward transforms are
// unnormalised; the inverse carries the 1/fft_len factor.
class ComplexSpectrogram {
 public:
  ComplexSpectrogram(std::size_t frames, std::size_t channels,
                     const StftConfig& config, int sample_rate,
                     std::size_t signal_length);

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  std::size_t channels() const { return channels_; }
  const StftConfig& config() const { return config_; }
  int sample_rate() const { return sample_rate_; }
  // Length of the time-domain signal this spectrogram was computed from.
  std::size_t signal_length() const { return signal_length_; }

  Complex& at(std::size_t t, std::size_t f, std::size_t c) {
    return data_[(t * bins_ + f) * channels_ + c];
  }
  const Complex& at(std::size_t t, std::size_t f, std::size_t c) const {
    return data_[(t * bins_ + f) * channels_ + c];
  }
  // Channel vector Y(t, f) of length `channels`.
  std::span<Complex> vec(std::size_t t, std::size_t f) {
    return std::span<Complex>(data_).subspan((t * bins_ + f) * channels_,
                                             channels_);
  }
  std::span<const Complex> vec(std::size_t t, std::size_t f) const {
    return std::span<const Complex>(data_).subspan((t * bins_ + f) * channels_,
                                                   channels_);
  }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  bool same_shape(const ComplexSpectrogram& other) const {
    return frames_ == other.frames_ && bins_ == other.bins_ &&
           channels_ == other.channels_;
  }
  ComplexSpectrogram select_channel(std::size_t c) const;
  ComplexSpectrogram zeros_like(std::size_t channels) const;
  bool all_finite() const;

 private:
  std::size_t frames_;
  std::size_t bins_;
  std::size_t channels_;
  StftConfig config_;
  int sample_rate_;
  std::size_t signal_length_;
  std::vector<Complex> data_;
};

ComplexSpectrogram stft_forward(const Waveform& wave, const StftConfig& cfg);

// Overlap-add synthesis, trimmed to `out_len` samples.
Waveform istft_inverse(const ComplexSpectrogram& spec, const StftConfig& cfg,
                       std::size_t out_len);
inline Waveform istft_inverse(const ComplexSpectrogram& spec) {
  return istft_inverse(spec, spec.config(), spec.signal_length());
}

}  // namespace uimvdr
