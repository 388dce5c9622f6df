#include <gtest/gtest.h>

#include <cmath>
#include <ostream>
#include <numbers>

#include "test_support.hpp"
#include "uimvdr/error.hpp"
#include "uimvdr/stft.hpp"

namespace uimvdr {
namespace {

using test::noise_waveform;
using test::rel_l2;

constexpr double kPi = std::numbers::pi;

TEST(StftConfig, StandardFraming) {
  const auto cfg = StftConfig::standard();
  EXPECT_EQ(cfg.window_len(), 1024u);
  EXPECT_EQ(cfg.hop_len(), 512u);
  EXPECT_EQ(cfg.fft_len(), 1024u);
  EXPECT_EQ(cfg.num_bins(), 513u);
  EXPECT_EQ(StftConfig::from_ms(64.0, 16000), cfg);
}

TEST(StftConfig, FiveSecondsWithoutPaddingGives155Frames) {
  const auto cfg = StftConfig::make(1024, 512, 1024, Window::kSqrtHann, Padding::kNone);
  const Waveform w(1, 80000, 16000);
  const auto spec = stft_forward(w, cfg);
  EXPECT_EQ(spec.frames(), 155u);
  EXPECT_EQ(spec.bins(), 513u);
}

TEST(StftConfig, ReflectPaddingAddsEdgeFrames) {
  // 80000 + 2 * 512 padded samples, ceil((81024 - 1024) / 512) + 1.
  EXPECT_EQ(StftConfig::standard().num_frames(80000), 158u);
}

TEST(StftConfig, RejectsInvalidFraming) {
  EXPECT_THROW(StftConfig::make(1024, 0, 1024), Error);
  EXPECT_THROW(StftConfig::make(1024, 2048, 2048), Error);
  EXPECT_THROW(StftConfig::make(1024, 512, 512), Error);
  // Squared sqrt-Hann at hop 700 is not constant overlap-add.
  EXPECT_THROW(StftConfig::make(1024, 700, 1024), Error);
  EXPECT_THROW(StftConfig::from_ms(0.0, 16000), Error);
}

TEST(Stft, ZeroInZeroOut) {
  const auto cfg = StftConfig::standard();
  const Waveform w(3, 5000, 16000);
  const auto spec = stft_forward(w, cfg);
  for (const auto& v : spec.data()) EXPECT_EQ(v, Complex(0.0, 0.0));
  const Waveform back = istft_inverse(spec);
  EXPECT_EQ(back.samples(), 5000u);
  for (double v : back.data()) EXPECT_EQ(v, 0.0);
}

TEST(Stft, RejectsEmptyAndShortInput) {
  const auto cfg = StftConfig::standard();
  EXPECT_THROW(stft_forward(Waveform(), cfg), Error);
  EXPECT_THROW(stft_forward(Waveform(1, 100, 16000), cfg), Error);
  const auto none = StftConfig::make(1024, 512, 1024, Window::kSqrtHann, Padding::kNone);
  EXPECT_THROW(stft_forward(Waveform(1, 1000, 16000), none), Error);
}

struct RoundTripCase {
  std::size_t window, hop, fft;
  Window kind;
};

void PrintTo(const RoundTripCase& c, std::ostream* os) {
  *os << c.window << "/" << c.hop << "/" << c.fft;
}

class StftRoundTrip : public ::testing::TestWithParam<RoundTripCase> {};

TEST_P(StftRoundTrip, ReconstructsWhiteNoise) {
  const auto p = GetParam();
  const auto cfg = StftConfig::make(p.window, p.hop, p.fft, p.kind);
  for (std::size_t len : std::initializer_list<std::size_t>{p.window, p.window + 1, 4999, 16000}) {
    const Waveform w = noise_waveform(len, 2, len);
    const Waveform back = istft_inverse(stft_forward(w, cfg), cfg, len);
    ASSERT_EQ(back.samples(), len);
    EXPECT_LE(rel_l2(back.data(), w.data()), 1e-10) << "len " << len;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Configs, StftRoundTrip,
    ::testing::Values(RoundTripCase{1024, 512, 1024, Window::kSqrtHann},
                      RoundTripCase{512, 256, 512, Window::kSqrtHann},
                      RoundTripCase{400, 100, 512, Window::kSqrtHann},
                      RoundTripCase{256, 256, 256, Window::kRectangular},
                      RoundTripCase{300, 150, 300, Window::kSqrtHann}),
    [](const ::testing::TestParamInfo<RoundTripCase>& info) {
      const auto& c = info.param;
      return "W" + std::to_string(c.window) + "H" + std::to_string(c.hop) + "N" +
             std::to_string(c.fft) + (c.kind == Window::kRectangular ? "Rect" : "SqrtHann");
    });

TEST(Stft, NoPaddingReconstructsInterior) {
  const auto cfg = StftConfig::make(512, 256, 512, Window::kSqrtHann, Padding::kNone);
  const Waveform w = noise_waveform(9, 1, 8192);
  const Waveform back = istft_inverse(stft_forward(w, cfg), cfg, w.samples());
  // Samples covered by two frames are exact; the first and last half
  // windows see a single tapered frame.
  for (std::size_t n = 256; n < 8192 - 256; ++n) {
    ASSERT_NEAR(back.at(0, n), w.at(0, n), 1e-10) << n;
  }
}

TEST(Stft, LinearInInput) {
  const auto cfg = StftConfig::standard();
  const Waveform x = noise_waveform(1, 2, 6000);
  const Waveform y = noise_waveform(2, 2, 6000);
  Waveform z = x;
  z *= 2.5;
  Waveform y3 = y;
  y3 *= -0.75;
  z += y3;
  const auto sx = stft_forward(x, cfg);
  const auto sy = stft_forward(y, cfg);
  const auto sz = stft_forward(z, cfg);
  for (std::size_t i = 0; i < sz.data().size(); ++i) {
    const Complex expect = 2.5 * sx.data()[i] - 0.75 * sy.data()[i];
    ASSERT_LT(std::abs(sz.data()[i] - expect), 1e-9);
  }
}

TEST(Stft, ParsevalPerFrame) {
  // Without padding, frame t is taper * x[t * hop ...]. With the
  // unnormalised forward DFT, sum |w x|^2 = (1 / N) sum_k |X_k|^2 over the
  // full spectrum; the one-sided bins between DC and Nyquist count twice.
  const auto cfg = StftConfig::make(512, 256, 512, Window::kSqrtHann, Padding::kNone);
  const Waveform w = noise_waveform(5, 1, 6000);
  const auto spec = stft_forward(w, cfg);
  const auto& taper = cfg.taper();
  double time_energy = 0.0, freq_energy = 0.0;
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    for (std::size_t n = 0; n < 512; ++n) {
      const double v = taper[n] * w.at(0, t * 256 + n);
      time_energy += v * v;
    }
    for (std::size_t f = 0; f < spec.bins(); ++f) {
      const double weight = (f == 0 || f == spec.bins() - 1) ? 1.0 : 2.0;
      freq_energy += weight * std::norm(spec.at(t, f, 0)) / 512.0;
    }
  }
  EXPECT_NEAR(freq_energy / time_energy, 1.0, 1e-6);
}

TEST(Stft, TaperIsPeriodicSqrtHann) {
  const auto cfg = StftConfig::standard();
  const auto& w = cfg.taper();
  ASSERT_EQ(w.size(), 1024u);
  EXPECT_EQ(w[0], 0.0);
  for (std::size_t n = 0; n < 1024; n += 37) {
    EXPECT_NEAR(w[n], std::sin(kPi * n / 1024.0), 1e-15);
  }
}

// Transform of the periodic sine window sin(pi n / N) at integer bin
// offset k, from the geometric series of each complex exponential:
// W(k) = (1/2i) [ 2 / (1 - e^{i pi (1 - 2k) / N}) - 2 / (1 - e^{-i pi (1 + 2k) / N}) ].
Complex sine_window_transform(int k, int n) {
  const Complex i(0.0, 1.0);
  const double a = kPi * (1.0 - 2.0 * k) / n;
  const double b = -kPi * (1.0 + 2.0 * k) / n;
  return (2.0 / (1.0 - std::exp(i * a)) - 2.0 / (1.0 - std::exp(i * b))) / (2.0 * i);
}

TEST(Stft, BinCentredToneMatchesWindowTransform) {
  const int n = 1024, bin = 128;
  const auto cfg = StftConfig::make(n, n / 2, n, Window::kSqrtHann, Padding::kNone);
  Waveform w(1, 4 * n, 16000);
  for (std::size_t s = 0; s < w.samples(); ++s) {
    w.at(0, s) = std::cos(2.0 * kPi * bin * static_cast<double>(s) / n);
  }
  const auto spec = stft_forward(w, cfg);
  const double peak = std::abs(spec.at(1, bin, 0));
  const double w0 = std::abs(sine_window_transform(0, n));
  for (int k = -8; k <= 8; ++k) {
    const double got = std::abs(spec.at(1, static_cast<std::size_t>(bin + k), 0)) / peak;
    const double expect = std::abs(sine_window_transform(k, n)) / w0;
    EXPECT_NEAR(got, expect, 1e-4) << "offset " << k;
    if (std::abs(k) >= 3) {
      EXPECT_LT(20.0 * std::log10(got), -30.0) << "offset " << k;
    }
  }
  // Far from the tone the spectrum is at the image's leakage floor.
  EXPECT_LT(std::abs(spec.at(1, 400, 0)) / peak, 1e-4);
}

TEST(Stft, RoundTripPreservesInterChannelAlignment) {
  const std::size_t len = 80000, lag = 7;
  const Waveform base = noise_waveform(11, 1, len + lag);
  Waveform w(2, len, 16000);
  for (std::size_t s = 0; s < len; ++s) {
    w.at(0, s) = base.at(0, s + lag);
    w.at(1, s) = base.at(0, s);  // channel 1 lags channel 0 by `lag`
  }
  const auto cfg = StftConfig::standard();
  const Waveform back = istft_inverse(stft_forward(w, cfg), cfg, len);
  auto xcorr = [&](const Waveform& x, int shift) {
    double acc = 0.0;
    for (std::size_t s = 64; s + 64 < len; ++s) {
      acc += x.at(0, s) * x.at(1, static_cast<std::size_t>(static_cast<long>(s) + shift));
    }
    return acc;
  };
  int best = 0;
  double best_v = -1e300;
  for (int shift = -20; shift <= 20; ++shift) {
    const double v = xcorr(back, shift);
    if (v > best_v) {
      best_v = v;
      best = shift;
    }
  }
  EXPECT_EQ(best, static_cast<int>(lag));
  EXPECT_LE(rel_l2(back.data(), w.data()), 1e-10);
}

TEST(Stft, InverseChecksShape) {
  const auto cfg = StftConfig::standard();
  const auto spec = stft_forward(noise_waveform(1, 1, 4096), cfg);
  EXPECT_THROW(istft_inverse(spec, StftConfig::from_ms(32.0, 16000), 4096), Error);
}

TEST(Stft, SelectChannelAndZerosLike) {
  const auto cfg = StftConfig::standard();
  const auto spec = stft_forward(noise_waveform(3, 3, 4096), cfg);
  const auto one = spec.select_channel(2);
  ASSERT_EQ(one.channels(), 1u);
  EXPECT_EQ(one.at(3, 17, 0), spec.at(3, 17, 2));
  const auto z = spec.zeros_like(1);
  EXPECT_EQ(z.frames(), spec.frames());
  EXPECT_EQ(z.signal_length(), spec.signal_length());
  EXPECT_THROW(spec.select_channel(3), Error);
}

}  // namespace
}  // namespace uimvdr
