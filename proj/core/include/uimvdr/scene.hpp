#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uimvdr/waveform.hpp"

namespace uimvdr {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct ArrayGeometry {
  std::string name;
  std::vector<Vec3> mics;  // metres

  std::size_t size() const { return mics.size(); }
  void validate() const;

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

// Approximate layouts of the three recording arrays. Only the envelope of
// the 16-microphone array is known; the other two use nominal dimensions.
ArrayGeometry respeaker_geometry(double side = 0.0457);
ArrayGeometry kinect_geometry(double spacing = 0.04);
// Two rectangles (length x width) in parallel planes `plane_gap` apart, eight
// microphones per plane evenly spaced along the perimeter from a corner.
ArrayGeometry sixteen_sounds_geometry(double length = 0.47, double width = 0.365,
                                      double plane_gap = 0.035);
ArrayGeometry linear_geometry(std::size_t count, double spacing);

// "respeaker", "kinect", "16sounds"; std::nullopt for anything else.
std::optional<ArrayGeometry> geometry_preset(std::string_view name);

// Far-field plane-wave arrival delays in seconds, zero-mean across channels.
// Azimuth is measured in the x-y plane from +x, elevation from that plane.
std::vector<double> steering_delays(const ArrayGeometry& geometry,
                                    double azimuth_deg, double elevation_deg,
                                    double speed_of_sound = kSpeedOfSound);

// Delays a mono signal per channel by phase rotation in the frequency domain
// and applies a common gain. Output has the input length.
Waveform render_source(const Waveform& mono, std::span<const double> delays,
                       double gain_db);

struct SceneSource {
  Waveform signal;  // mono
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double gain_db = 0.0;
};

struct SceneSpec {
  ArrayGeometry geometry;
  std::vector<SceneSource> sources;
  int sample_rate = 16000;
  double speed_of_sound = kSpeedOfSound;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SceneMix {
  Waveform mixture;
  std::vector<Waveform> stems;  // one multichannel image per source
};

// mixture = sum of rendered stems, accumulated in source order.
SceneMix mix_scene(const SceneSpec& spec);

struct MomSpec {
  std::vector<Waveform> target_mixtures;
  std::vector<Waveform> interference_mixtures;
  std::optional<std::size_t> k;  // drawn from {2, 3, 4} when absent
  double gain_lo_db = -5.0;
  double gain_hi_db = 5.0;
  std::uint64_t seed = 0;
};

struct MomResult {
  Waveform mom;
  std::vector<Waveform> components;  // gain-scaled mixtures, target first
  std::vector<double> gains_db;
  std::size_t target_index = 0;
  std::vector<std::size_t> interference_indices;
};

// Draw order from Rng(seed): k (when not fixed), the target mixture index,
// k - 1 interference indices (with replacement), then k gains in mixture
// order, each uniform in [gain_lo_db, gain_hi_db).
MomResult build_mom(const MomSpec& spec);

// Full convolution of `mono` with each RIR channel, trimmed to the input
// length.
Waveform convolve_rir(const Waveform& mono, const Waveform& rirs);

enum class SourceKind { kHarmonic, kNoise };

std::string_view source_kind_name(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view name);

// Deterministic synthetic test signal: kHarmonic is a voiced, syllable-gated
// harmonic series with a gliding pitch; kNoise is burst-gated coloured noise.
// Peak-normalised to 0.5.
Waveform synth_source(SourceKind kind, std::size_t samples, int sample_rate,
                      std::uint64_t seed);

}  // namespace uimvdr
