#include "uimvdr/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "uimvdr/error.hpp"

namespace uimvdr {

namespace {

std::vector<double> make_taper(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::kSqrtHann) {
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) /
                           static_cast<double>(n);
      w[i] = std::sqrt(0.5 - 0.5 * std::cos(phase));
    }
  }
  return w;
}

// Builds the framed signal for one channel, including edge padding.
std::vector<double> pad_channel(std::span<const double> x,
                                const StftConfig& cfg, std::size_t frames) {
  const std::size_t padded_len =
      (frames - 1) * cfg.hop_len() + cfg.window_len();
  std::vector<double> out(padded_len, 0.0);
  const std::size_t pad = cfg.left_pad();
  const std::size_t len = x.size();
  // Without padding the trailing partial frame is dropped.
  const std::size_t kept = std::min(len, padded_len - pad);
  std::copy_n(x.begin(), kept, out.begin() + static_cast<std::ptrdiff_t>(pad));
  if (cfg.padding() == Padding::kReflect) {
    for (std::size_t i = 1; i <= pad; ++i) {
      out[pad - i] = x[i];
      if (pad + len - 1 + i < padded_len) out[pad + len - 1 + i] = x[len - 1 - i];
    }
  }
  return out;
}

}  // namespace

StftConfig StftConfig::make(std::size_t window_len, std::size_t hop_len,
                            std::size_t fft_len, Window window,
                            Padding padding) {
  require(hop_len > 0 && hop_len <= window_len && window_len <= fft_len,
          ErrorKind::kInvalidArgument,
          "stft config requires 0 < hop <= window <= fft");
  StftConfig cfg;
  cfg.window_len_ = window_len;
  cfg.hop_len_ = hop_len;
  cfg.fft_len_ = fft_len;
  cfg.window_ = window;
  cfg.padding_ = padding;
  cfg.taper_ = make_taper(window, window_len);

  // Constant-overlap-add check on w^2, evaluated over one hop period.
  std::vector<double> sums(hop_len, 0.0);
  for (std::size_t i = 0; i < window_len; ++i) {
    sums[i % hop_len] += cfg.taper_[i] * cfg.taper_[i];
  }
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  require(*hi > 0.0 && (*hi - *lo) <= 1e-9 * *hi, ErrorKind::kInvalidArgument,
          "taper and hop do not satisfy constant overlap-add");
  cfg.overlap_gain_ = *hi;
  return cfg;
}

StftConfig StftConfig::from_ms(double window_ms, int sample_rate,
                               Padding padding) {
  require(window_ms > 0.0 && sample_rate > 0, ErrorKind::kInvalidArgument,
          "window length and sample rate must be positive");
  auto window = static_cast<std::size_t>(
      std::lround(window_ms * 1e-3 * static_cast<double>(sample_rate)));
  window += window % 2;
  require(window >= 2, ErrorKind::kInvalidArgument, "window too short");
  return make(window, window / 2, window, Window::kSqrtHann, padding);
}

StftConfig StftConfig::standard() { return make(1024, 512, 1024); }

std::size_t StftConfig::left_pad() const {
  return padding_ == Padding::kReflect ? window_len_ / 2 : 0;
}

std::size_t StftConfig::num_frames(std::size_t samples) const {
  if (padding_ == Padding::kReflect) {
    const std::size_t span = samples + 2 * left_pad();
    if (span < window_len_) return 1;
    return 1 + (span - window_len_ + hop_len_ - 1) / hop_len_;
  }
  if (samples < window_len_) return 0;
  return 1 + (samples - window_len_) / hop_len_;
}

ComplexSpectrogram::ComplexSpectrogram(std::size_t frames, std::size_t channels,
                                       const StftConfig& config,
                                       int sample_rate,
                                       std::size_t signal_length)
    : frames_(frames),
      bins_(config.num_bins()),
      channels_(channels),
      config_(config),
      sample_rate_(sample_rate),
      signal_length_(signal_length),
      data_(frames * config.num_bins() * channels) {}

ComplexSpectrogram ComplexSpectrogram::select_channel(std::size_t c) const {
  require(c < channels_, ErrorKind::kInvalidArgument, "channel out of range");
  ComplexSpectrogram out(frames_, 1, config_, sample_rate_, signal_length_);
  for (std::size_t t = 0; t < frames_; ++t) {
    for (std::size_t f = 0; f < bins_; ++f) out.at(t, f, 0) = at(t, f, c);
  }
  return out;
}

ComplexSpectrogram ComplexSpectrogram::zeros_like(std::size_t channels) const {
  return ComplexSpectrogram(frames_, channels, config_, sample_rate_,
                            signal_length_);
}

bool ComplexSpectrogram::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

ComplexSpectrogram stft_forward(const Waveform& wave, const StftConfig& cfg) {
  require(!wave.empty(), ErrorKind::kInvalidArgument, "empty waveform");
  const std::size_t len = wave.samples();
  if (cfg.padding() == Padding::kReflect) {
    require(len > cfg.left_pad(), ErrorKind::kInvalidArgument,
            "waveform shorter than half a window cannot be reflect-padded");
  } else {
    require(len >= cfg.window_len(), ErrorKind::kInvalidArgument,
            "waveform shorter than one window");
  }
  const std::size_t frames = cfg.num_frames(len);
  const std::size_t win = cfg.window_len();
  const auto& taper = cfg.taper();

  ComplexSpectrogram spec(frames, wave.channels(), cfg, wave.sample_rate(), len);
  detail::RealFft fft(cfg.fft_len());
  std::vector<double> frame(win);
  std::vector<Complex> bins(cfg.num_bins());
  for (std::size_t c = 0; c < wave.channels(); ++c) {
    const auto padded = pad_channel(wave.channel(c), cfg, frames);
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t start = t * cfg.hop_len();
      for (std::size_t i = 0; i < win; ++i) frame[i] = padded[start + i] * taper[i];
      fft.forward(frame, bins);
      for (std::size_t f = 0; f < bins.size(); ++f) spec.at(t, f, c) = bins[f];
    }
  }
  return spec;
}

Waveform istft_inverse(const ComplexSpectrogram& spec, const StftConfig& cfg,
                       std::size_t out_len) {
  require(spec.config() == cfg, ErrorKind::kInvalidArgument,
          "spectrogram was computed with a different stft config");
  require(spec.frames() > 0 && spec.channels() > 0, ErrorKind::kInvalidArgument,
          "empty spectrogram");
  const std::size_t win = cfg.window_len();
  const std::size_t hop = cfg.hop_len();
  const std::size_t padded_len = (spec.frames() - 1) * hop + win;
  const std::size_t pad = cfg.left_pad();
  require(out_len + pad <= padded_len, ErrorKind::kInvalidArgument,
          "requested length exceeds the reconstructible signal");

  const auto& taper = cfg.taper();
  std::vector<double> weight(padded_len, 0.0);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    for (std::size_t i = 0; i < win; ++i) weight[t * hop + i] += taper[i] * taper[i];
  }
  const double floor = 1e-10 * cfg.overlap_gain();

  Waveform out(spec.channels(), out_len, spec.sample_rate());
  detail::RealFft fft(cfg.fft_len());
  const double scale = 1.0 / static_cast<double>(cfg.fft_len());
  std::vector<Complex> bins(spec.bins());
  std::vector<double> frame(cfg.fft_len());
  std::vector<double> acc(padded_len);
  for (std::size_t c = 0; c < spec.channels(); ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t t = 0; t < spec.frames(); ++t) {
      for (std::size_t f = 0; f < bins.size(); ++f) bins[f] = spec.at(t, f, c);
      fft.inverse(bins, frame);
      const std::size_t start = t * hop;
      for (std::size_t i = 0; i < win; ++i) {
        acc[start + i] += frame[i] * scale * taper[i];
      }
    }
    auto dst = out.channel(c);
    for (std::size_t n = 0; n < out_len; ++n) {
      const double w = weight[pad + n];
      dst[n] = w > floor ? acc[pad + n] / w : 0.0;
    }
  }
  return out;
}

}  // namespace uimvdr
