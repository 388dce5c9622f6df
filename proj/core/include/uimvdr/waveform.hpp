#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uimvdr {

// Multichannel time-domain signal, stored channel-major.
class Waveform {
 public:
  Waveform() = default;

  // Zero-initialised signal with `channels` x `samples`.
  Waveform(std::size_t channels, std::size_t samples, int sample_rate);

  // Takes ownership of channel-major data; every channel must have the same
  // length and contain only finite values.
  static Waveform from_channels(const std::vector<std::vector<double>>& channels,
                                int sample_rate);
  static Waveform mono(std::vector<double> samples, int sample_rate);

  std::size_t channels() const { return channels_; }
  std::size_t samples() const { return samples_; }
  int sample_rate() const { return sample_rate_; }
  bool empty() const { return channels_ == 0 || samples_ == 0; }

  std::span<double> channel(std::size_t c);
  std::span<const double> channel(std::size_t c) const;

  double& at(std::size_t c, std::size_t n) { return data_[c * samples_ + n]; }
  double at(std::size_t c, std::size_t n) const { return data_[c * samples_ + n]; }

  // Copy of a single channel as a mono waveform.
  Waveform select_channel(std::size_t c) const;

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool all_finite() const;

  Waveform& operator+=(const Waveform& other);
  Waveform& operator*=(double gain);

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t samples_ = 0;
  int sample_rate_ = 0;
  std::vector<double> data_;
};

double energy(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace uimvdr
