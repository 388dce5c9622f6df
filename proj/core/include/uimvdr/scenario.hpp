#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uimvdr/scene.hpp"

namespace uimvdr {

// Fully resolved description of one simulated scene: everything needed to
// regenerate the exact same stems without consulting a random generator.
struct SourceDescription {
  bool target = false;
  SourceKind kind = SourceKind::kHarmonic;  // used when `file` is empty
  std::uint64_t seed = 0;                   // synthetic signal seed
  std::string file;                         // mono WAV source, if any
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double gain_db = 0.0;
};

struct SceneDescription {
  ArrayGeometry geometry;
  int sample_rate = 16000;
  std::size_t samples = 0;
  double speed_of_sound = kSpeedOfSound;
  std::uint64_t seed = 0;
  std::size_t ref_mic = 0;
  std::vector<SourceDescription> sources;  // target first
};

struct RandomSceneOptions {
  ArrayGeometry geometry = respeaker_geometry();
  int sample_rate = 16000;
  double duration_s = 5.0;
  std::size_t min_interferers = 1;
  std::size_t max_interferers = 3;
  // Reference-channel input SI-SDR of the mixture against the target image.
  double input_sdr_lo_db = -5.0;
  double input_sdr_hi_db = 5.0;
  std::size_t ref_mic = 0;
  double speed_of_sound = kSpeedOfSound;
};

// Draw order from Rng(seed): interferer count, target grid slot (8 slots at
// 45 degrees), a shuffle of the remaining slots, interferer kinds, one signal
// seed per source, relative interferer gains in [-3, 3) dB, and the input
// SI-SDR. Interferer gains are then shifted by a common offset so that the
// reference channel meets that SI-SDR.
SceneDescription random_scene(const RandomSceneOptions& options, std::uint64_t seed);

// Deterministic rendering of a description. Relative source files resolve
// against `base_dir`.
SceneMix render_scene(const SceneDescription& scene,
                      const std::filesystem::path& base_dir = {});

// SI-SDR of the mixture's reference channel against the target image.
double input_si_sdr(const SceneMix& mix, std::size_t ref_mic);

}  // namespace uimvdr
