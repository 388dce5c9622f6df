#include "uimvdr/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "uimvdr/error.hpp"
#include "uimvdr/rng.hpp"
#include "uimvdr/stft.hpp"

namespace uimvdr {

namespace {

constexpr double kPi = std::numbers::pi;

double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

// Point at arc length `s` along the perimeter of a centred rectangle,
// starting at (-length/2, -width/2) and walking counter-clockwise.
Vec3 perimeter_point(double s, double length, double width, double z) {
  const double x0 = -length / 2, y0 = -width / 2;
  if (s <= length) return {x0 + s, y0, z};
  s -= length;
  if (s <= width) return {-x0, y0 + s, z};
  s -= width;
  if (s <= length) return {-x0 - s, -y0, z};
  s -= length;
  return {x0, -y0 - s, z};
}

}  // namespace

void ArrayGeometry::validate() const {
  require(!mics.empty(), ErrorKind::kInvalidArgument,
          "array geometry needs at least one microphone");
  for (std::size_t i = 0; i < mics.size(); ++i) {
    const Vec3& a = mics[i];
    require(std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z),
            ErrorKind::kInvalidArgument, "microphone coordinates must be finite");
    for (std::size_t j = i + 1; j < mics.size(); ++j) {
      require(!(a == mics[j]), ErrorKind::kInvalidArgument,
              "microphone positions must be pairwise distinct");
    }
  }
}

ArrayGeometry respeaker_geometry(double side) {
  require(side > 0.0, ErrorKind::kInvalidArgument, "array side must be positive");
  const double h = side / 2;
  return {"respeaker", {{h, h, 0}, {-h, h, 0}, {-h, -h, 0}, {h, -h, 0}}};
}

ArrayGeometry kinect_geometry(double spacing) {
  ArrayGeometry g = linear_geometry(4, spacing);
  g.name = "kinect";
  return g;
}

ArrayGeometry sixteen_sounds_geometry(double length, double width,
                                      double plane_gap) {
  require(length > 0 && width > 0 && plane_gap > 0, ErrorKind::kInvalidArgument,
          "array dimensions must be positive");
  ArrayGeometry g{"16sounds", {}};
  const double perimeter = 2 * (length + width);
  for (double z : {-plane_gap / 2, plane_gap / 2}) {
    for (int i = 0; i < 8; ++i) {
      g.mics.push_back(perimeter_point(perimeter * i / 8.0, length, width, z));
    }
  }
  return g;
}

ArrayGeometry linear_geometry(std::size_t count, double spacing) {
  require(count >= 1 && spacing > 0.0, ErrorKind::kInvalidArgument,
          "linear array needs >= 1 microphone and positive spacing");
  ArrayGeometry g{"linear", {}};
  const double centre = (static_cast<double>(count) - 1) / 2;
  for (std::size_t i = 0; i < count; ++i) {
    g.mics.push_back({(static_cast<double>(i) - centre) * spacing, 0, 0});
  }
  return g;
}

std::optional<ArrayGeometry> geometry_preset(std::string_view name) {
  if (name == "respeaker") return respeaker_geometry();
  if (name == "kinect") return kinect_geometry();
  if (name == "16sounds") return sixteen_sounds_geometry();
  return std::nullopt;
}

std::vector<double> steering_delays(const ArrayGeometry& geometry,
                                    double azimuth_deg, double elevation_deg,
                                    double speed_of_sound) {
  geometry.validate();
  require(speed_of_sound > 0.0, ErrorKind::kInvalidArgument,
          "speed of sound must be positive");
  const double az = azimuth_deg * kPi / 180.0;
  const double el = elevation_deg * kPi / 180.0;
  const Vec3 k{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
               std::sin(el)};
  std::vector<double> delays(geometry.size());
  double mean = 0.0;
  for (std::size_t c = 0; c < geometry.size(); ++c) {
    const Vec3& p = geometry.mics[c];
    delays[c] = -(p.x * k.x + p.y * k.y + p.z * k.z) / speed_of_sound;
    mean += delays[c];
  }
  mean /= static_cast<double>(delays.size());
  for (double& d : delays) d -= mean;
  return delays;
}

Waveform render_source(const Waveform& mono, std::span<const double> delays,
                       double gain_db) {
  require(mono.channels() == 1 && !mono.empty(), ErrorKind::kInvalidArgument,
          "render_source expects a non-empty mono signal");
  require(!delays.empty(), ErrorKind::kInvalidArgument, "no channel delays given");
  require(std::isfinite(gain_db), ErrorKind::kInvalidArgument,
          "gain must be finite");
  const double fs = mono.sample_rate();
  double max_shift = 0.0;
  for (double d : delays) {
    require(std::isfinite(d), ErrorKind::kInvalidArgument, "delays must be finite");
    max_shift = std::max(max_shift, std::abs(d) * fs);
  }
  const std::size_t len = mono.samples();
  // Padding absorbs the circular wrap of the shift and most sinc leakage.
  const auto pad = static_cast<std::size_t>(std::ceil(max_shift)) + 64;
  const std::size_t n = detail::good_fft_size(len + pad);

  detail::RealFft fft(n);
  std::vector<Complex> spectrum(fft.bins());
  fft.forward(mono.channel(0), spectrum);

  const double amplitude = db_to_amplitude(gain_db) / static_cast<double>(n);
  Waveform out(delays.size(), len, mono.sample_rate());
  std::vector<Complex> shifted(spectrum.size());
  std::vector<double> buffer(n);
  for (std::size_t c = 0; c < delays.size(); ++c) {
    const double shift = delays[c] * fs;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      const double phase = -2.0 * kPi * static_cast<double>(k) * shift /
                           static_cast<double>(n);
      shifted[k] = spectrum[k] * std::polar(1.0, phase);
    }
    fft.inverse(shifted, buffer);
    auto dst = out.channel(c);
    for (std::size_t i = 0; i < len; ++i) dst[i] = buffer[i] * amplitude;
  }
  return out;
}

void SceneSpec::validate() const {
  geometry.validate();
  require(sample_rate > 0 && speed_of_sound > 0, ErrorKind::kInvalidArgument,
          "sample rate and speed of sound must be positive");
  require(!sources.empty(), ErrorKind::kInvalidArgument, "scene has no sources");
  const std::size_t len = sources.front().signal.samples();
  for (const auto& s : sources) {
    require(s.signal.sample_rate() == sample_rate, ErrorKind::kInvalidArgument,
            "source sample rate differs from scene sample rate");
    require(s.signal.channels() == 1 && s.signal.samples() == len && len > 0,
            ErrorKind::kShapeMismatch,
            "scene sources must be mono signals of equal length");
    require(s.azimuth_deg >= 0.0 && s.azimuth_deg < 360.0,
            ErrorKind::kInvalidArgument, "azimuth must lie in [0, 360)");
    require(std::abs(s.gain_db) <= 60.0, ErrorKind::kInvalidArgument,
            "source gain must lie within +/-60 dB");
    require(std::isfinite(s.elevation_deg), ErrorKind::kInvalidArgument,
            "elevation must be finite");
  }
}

SceneMix mix_scene(const SceneSpec& spec) {
  spec.validate();
  const std::size_t len = spec.sources.front().signal.samples();
  SceneMix mix{Waveform(spec.geometry.size(), len, spec.sample_rate), {}};
  for (const auto& src : spec.sources) {
    const auto delays = steering_delays(spec.geometry, src.azimuth_deg,
                                        src.elevation_deg, spec.speed_of_sound);
    mix.stems.push_back(render_source(src.signal, delays, src.gain_db));
    mix.mixture += mix.stems.back();
  }
  return mix;
}

MomResult build_mom(const MomSpec& spec) {
  require(!spec.target_mixtures.empty() && !spec.interference_mixtures.empty(),
          ErrorKind::kInvalidArgument,
          "mixture of mixtures needs target and interference mixtures");
  require(spec.gain_lo_db <= spec.gain_hi_db && std::isfinite(spec.gain_lo_db) &&
              std::isfinite(spec.gain_hi_db),
          ErrorKind::kInvalidArgument, "invalid gain range");
  if (spec.k) {
    require(*spec.k >= 2 && *spec.k <= 4, ErrorKind::kInvalidArgument,
            "mixture of mixtures holds 2 to 4 mixtures");
  }
  const Waveform& shape = spec.target_mixtures.front();
  auto check_shape = [&](const Waveform& w) {
    require(w.channels() == shape.channels() && w.samples() == shape.samples() &&
                w.sample_rate() == shape.sample_rate() && !w.empty(),
            ErrorKind::kShapeMismatch, "all mixtures must share one shape");
  };
  for (const auto& w : spec.target_mixtures) check_shape(w);
  for (const auto& w : spec.interference_mixtures) check_shape(w);

  Rng rng(spec.seed);
  const std::size_t k = spec.k ? *spec.k : 2 + rng.index(3);
  MomResult result{Waveform(shape.channels(), shape.samples(), shape.sample_rate()),
                   {}, {}, 0, {}};
  result.target_index = rng.index(spec.target_mixtures.size());
  for (std::size_t i = 1; i < k; ++i) {
    result.interference_indices.push_back(
        rng.index(spec.interference_mixtures.size()));
  }
  for (std::size_t i = 0; i < k; ++i) {
    result.gains_db.push_back(rng.uniform(spec.gain_lo_db, spec.gain_hi_db));
  }
  for (std::size_t i = 0; i < k; ++i) {
    Waveform component = i == 0 ? spec.target_mixtures[result.target_index]
                                : spec.interference_mixtures
                                      [result.interference_indices[i - 1]];
    if (result.gains_db[i] != 0.0) component *= db_to_amplitude(result.gains_db[i]);
    result.mom += component;
    result.components.push_back(std::move(component));
  }
  return result;
}

Waveform convolve_rir(const Waveform& mono, const Waveform& rirs) {
  require(mono.channels() == 1 && !mono.empty(), ErrorKind::kInvalidArgument,
          "convolve_rir expects a non-empty mono signal");
  require(!rirs.empty(), ErrorKind::kInvalidArgument, "empty impulse response");
  const std::size_t len = mono.samples();
  const std::size_t n = detail::good_fft_size(len + rirs.samples() - 1);
  detail::RealFft fft(n);
  std::vector<Complex> signal(fft.bins());
  std::vector<Complex> response(fft.bins());
  std::vector<double> buffer(n);
  fft.forward(mono.channel(0), signal);

  Waveform out(rirs.channels(), len, mono.sample_rate());
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < rirs.channels(); ++c) {
    fft.forward(rirs.channel(c), response);
    for (std::size_t k = 0; k < response.size(); ++k) response[k] *= signal[k];
    fft.inverse(response, buffer);
    auto dst = out.channel(c);
    for (std::size_t i = 0; i < len; ++i) dst[i] = buffer[i] * scale;
  }
  return out;
}

std::string_view source_kind_name(SourceKind kind) {
  return kind == SourceKind::kHarmonic ? "harmonic" : "noise";
}

std::optional<SourceKind> parse_source_kind(std::string_view name) {
  if (name == "harmonic") return SourceKind::kHarmonic;
  if (name == "noise") return SourceKind::kNoise;
  return std::nullopt;
}

Waveform synth_source(SourceKind kind, std::size_t samples, int sample_rate,
                      std::uint64_t seed) {
  require(samples > 0 && sample_rate > 0, ErrorKind::kInvalidArgument,
          "synthetic source needs a positive length and sample rate");
  Rng rng(seed);
  const double fs = sample_rate;
  std::vector<double> x(samples, 0.0);

  // Gate: smooth on/off envelope at a syllable-like rate.
  const double gate_rate = rng.uniform(2.0, 5.0);
  const double gate_phase = rng.uniform(0.0, 2.0 * kPi);
  auto gate = [&](std::size_t i) {
    const double s = std::sin(2.0 * kPi * gate_rate * static_cast<double>(i) / fs +
                              gate_phase);
    return 0.15 + 0.85 * s * s;
  };

  if (kind == SourceKind::kHarmonic) {
    const double f0 = rng.uniform(100.0, 250.0);
    const double glide_rate = rng.uniform(0.2, 0.8);
    const double glide_phase = rng.uniform(0.0, 2.0 * kPi);
    const double max_freq = std::min(5000.0, 0.45 * fs);
    const int harmonics = std::max(1, static_cast<int>(max_freq / (f0 * 1.1)));
    std::vector<double> amp(harmonics), phase(harmonics);
    for (int h = 0; h < harmonics; ++h) {
      amp[h] = rng.uniform(0.5, 1.0) / (h + 1);
      phase[h] = rng.uniform(0.0, 2.0 * kPi);
    }
    double base_phase = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = static_cast<double>(i) / fs;
      const double f = f0 * (1.0 + 0.08 * std::sin(2.0 * kPi * glide_rate * t + glide_phase));
      base_phase += 2.0 * kPi * f / fs;
      double v = 0.0;
      for (int h = 0; h < harmonics; ++h) {
        v += amp[h] * std::sin((h + 1) * base_phase + phase[h]);
      }
      x[i] = v * gate(i) + 0.02 * rng.normal();
    }
  } else {
    // One-pole coloured noise.
    const double pole = rng.uniform(0.3, 0.9);
    double state = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      state = pole * state + rng.normal();
      x[i] = state * gate(i);
    }
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : x) v *= 0.5 / peak;
  }
  return Waveform::mono(std::move(x), sample_rate);
}

}  // namespace uimvdr
