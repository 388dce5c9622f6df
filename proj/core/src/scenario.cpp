#include "uimvdr/scenario.hpp"

#include <cmath>
#include <numeric>

#include "uimvdr/error.hpp"
#include "uimvdr/io/wav.hpp"
#include "uimvdr/metrics.hpp"
#include "uimvdr/rng.hpp"

namespace uimvdr {

namespace {

constexpr std::size_t kGridSlots = 8;

Waveform source_signal(const SourceDescription& src, const SceneDescription& scene,
                       const std::filesystem::path& base_dir) {
  if (src.file.empty()) {
    return synth_source(src.kind, scene.samples, scene.sample_rate, src.seed);
  }
  std::filesystem::path path(src.file);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  Waveform w = io::read_wav(path);
  require(w.sample_rate() == scene.sample_rate, ErrorKind::kInvalidArgument,
          "source " + src.file + " has a different sample rate than the scene");
  Waveform mono = w.select_channel(0);
  Waveform fitted(1, scene.samples, scene.sample_rate);
  const std::size_t n = std::min(scene.samples, mono.samples());
  std::copy_n(mono.channel(0).begin(), n, fitted.channel(0).begin());
  return fitted;
}

}  // namespace

SceneDescription random_scene(const RandomSceneOptions& options, std::uint64_t seed) {
  options.geometry.validate();
  require(options.min_interferers >= 1 &&
              options.min_interferers <= options.max_interferers &&
              options.max_interferers < kGridSlots,
          ErrorKind::kInvalidArgument, "interferer count range must lie in [1, 7]");
  require(options.duration_s > 0.0 && options.sample_rate > 0,
          ErrorKind::kInvalidArgument, "duration and sample rate must be positive");
  require(options.input_sdr_lo_db <= options.input_sdr_hi_db,
          ErrorKind::kInvalidArgument, "invalid input SI-SDR range");
  require(options.ref_mic < options.geometry.size(), ErrorKind::kInvalidArgument,
          "reference microphone out of range");

  Rng rng(seed);
  SceneDescription scene;
  scene.geometry = options.geometry;
  scene.sample_rate = options.sample_rate;
  scene.samples = static_cast<std::size_t>(
      std::llround(options.duration_s * options.sample_rate));
  scene.speed_of_sound = options.speed_of_sound;
  scene.seed = seed;
  scene.ref_mic = options.ref_mic;

  const std::size_t interferers =
      options.min_interferers +
      rng.index(options.max_interferers - options.min_interferers + 1);
  const std::size_t target_slot = rng.index(kGridSlots);
  std::vector<std::size_t> slots;
  for (std::size_t s = 0; s < kGridSlots; ++s) {
    if (s != target_slot) slots.push_back(s);
  }
  for (std::size_t i = slots.size() - 1; i > 0; --i) {
    std::swap(slots[i], slots[rng.index(i + 1)]);
  }

  scene.sources.push_back({true, SourceKind::kHarmonic, 0, "",
                           45.0 * static_cast<double>(target_slot), 0.0, 0.0});
  for (std::size_t i = 0; i < interferers; ++i) {
    const SourceKind kind = rng.index(2) == 0 ? SourceKind::kHarmonic : SourceKind::kNoise;
    scene.sources.push_back(
        {false, kind, 0, "", 45.0 * static_cast<double>(slots[i]), 0.0, 0.0});
  }
  for (auto& src : scene.sources) src.seed = rng.next_u64();
  std::vector<double> relative(interferers);
  for (double& g : relative) g = rng.uniform(-3.0, 3.0);
  const double wanted = rng.uniform(options.input_sdr_lo_db, options.input_sdr_hi_db);

  // Reference-channel images at the relative gains.
  const SceneMix base = render_scene(scene);
  const auto target = base.stems[0].channel(scene.ref_mic);
  std::vector<double> noise(scene.samples, 0.0);
  for (std::size_t i = 0; i < interferers; ++i) {
    const auto stem = base.stems[i + 1].channel(scene.ref_mic);
    const double a = std::pow(10.0, relative[i] / 20.0);
    for (std::size_t n = 0; n < scene.samples; ++n) noise[n] += a * stem[n];
  }
  std::vector<double> mix(scene.samples);
  auto sdr_at = [&](double offset_db) {
    const double a = std::pow(10.0, offset_db / 20.0);
    for (std::size_t n = 0; n < scene.samples; ++n) mix[n] = target[n] + a * noise[n];
    return si_sdr(mix, target);
  };
  // SI-SDR falls monotonically as the interference offset rises.
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sdr_at(mid) > wanted ? lo : hi) = mid;
  }
  const double offset = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < interferers; ++i) {
    scene.sources[i + 1].gain_db = relative[i] + offset;
  }
  return scene;
}

SceneMix render_scene(const SceneDescription& scene,
                      const std::filesystem::path& base_dir) {
  require(scene.samples > 0, ErrorKind::kInvalidArgument, "scene has no samples");
  require(!scene.sources.empty(), ErrorKind::kInvalidArgument, "scene has no sources");
  SceneSpec spec{scene.geometry, {}, scene.sample_rate, scene.speed_of_sound, scene.seed};
  for (const auto& src : scene.sources) {
    spec.sources.push_back({source_signal(src, scene, base_dir), src.azimuth_deg,
                            src.elevation_deg, src.gain_db});
  }
  return mix_scene(spec);
}

double input_si_sdr(const SceneMix& mix, std::size_t ref_mic) {
  require(!mix.stems.empty(), ErrorKind::kInvalidArgument, "scene has no stems");
  return si_sdr(mix.mixture.channel(ref_mic), mix.stems.front().channel(ref_mic));
}

}  // namespace uimvdr
