#include "uimvdr/waveform.hpp"

#include <algorithm>
#include <cmath>

#include "uimvdr/error.hpp"

namespace uimvdr {

Waveform::Waveform(std::size_t channels, std::size_t samples, int sample_rate)
    : channels_(channels),
      samples_(samples),
      sample_rate_(sample_rate),
      data_(channels * samples, 0.0) {
  require(sample_rate > 0, ErrorKind::kInvalidArgument,
          "sample rate must be positive");
}

Waveform Waveform::from_channels(const std::vector<std::vector<double>>& channels,
                                 int sample_rate) {
  require(!channels.empty(), ErrorKind::kInvalidArgument,
          "waveform needs at least one channel");
  const std::size_t len = channels.front().size();
  Waveform w(channels.size(), len, sample_rate);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    require(channels[c].size() == len, ErrorKind::kShapeMismatch,
            "all channels must have equal length");
    std::copy(channels[c].begin(), channels[c].end(), w.channel(c).begin());
  }
  require(w.all_finite(), ErrorKind::kInvalidArgument,
          "waveform samples must be finite");
  return w;
}

Waveform Waveform::mono(std::vector<double> samples, int sample_rate) {
  Waveform w(1, 0, sample_rate);
  w.samples_ = samples.size();
  w.data_ = std::move(samples);
  require(w.all_finite(), ErrorKind::kInvalidArgument,
          "waveform samples must be finite");
  return w;
}

std::span<double> Waveform::channel(std::size_t c) {
  require(c < channels_, ErrorKind::kInvalidArgument, "channel out of range");
  return std::span<double>(data_).subspan(c * samples_, samples_);
}

std::span<const double> Waveform::channel(std::size_t c) const {
  require(c < channels_, ErrorKind::kInvalidArgument, "channel out of range");
  return std::span<const double>(data_).subspan(c * samples_, samples_);
}

Waveform Waveform::select_channel(std::size_t c) const {
  auto src = channel(c);
  Waveform out(1, samples_, sample_rate_);
  std::copy(src.begin(), src.end(), out.data_.begin());
  return out;
}

bool Waveform::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Waveform& Waveform::operator+=(const Waveform& other) {
  require(other.channels_ == channels_ && other.samples_ == samples_,
          ErrorKind::kShapeMismatch, "waveform shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Waveform& Waveform::operator*=(double gain) {
  for (double& v : data_) v *= gain;
  return *this;
}

double energy(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::kShapeMismatch,
          "dot product of unequal lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace uimvdr
