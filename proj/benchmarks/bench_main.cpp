#include <benchmark/benchmark.h>

#include "uimvdr/beamforming.hpp"
#include "uimvdr/metrics.hpp"
#include "uimvdr/mixit.hpp"
#include "uimvdr/pipeline.hpp"
#include "uimvdr/scenario.hpp"
#include "uimvdr/stft.hpp"

namespace {

using namespace uimvdr;

// Five-second four-channel scene, rendered once.
const SceneMix& scene() {
  static const SceneMix mix = render_scene(random_scene(RandomSceneOptions{}, 1));
  return mix;
}

void BM_StftForward(benchmark::State& state) {
  const auto cfg = StftConfig::standard();
  const Waveform& y = scene().mixture;
  for (auto _ : state) benchmark::DoNotOptimize(stft_forward(y, cfg));
  state.SetItemsProcessed(state.iterations() * y.samples());
}
BENCHMARK(BM_StftForward)->Unit(benchmark::kMillisecond);

void BM_StftInverse(benchmark::State& state) {
  const auto cfg = StftConfig::standard();
  const auto spec = stft_forward(scene().mixture, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(istft_inverse(spec));
}
BENCHMARK(BM_StftInverse)->Unit(benchmark::kMillisecond);

void BM_Scm(benchmark::State& state) {
  const auto y = stft_forward(scene().mixture, StftConfig::standard());
  for (auto _ : state) benchmark::DoNotOptimize(scm_target(y));
}
BENCHMARK(BM_Scm)->Unit(benchmark::kMillisecond);

void BM_MvdrWeights(benchmark::State& state) {
  const auto cfg = StftConfig::standard();
  const auto y = stft_forward(scene().mixture, cfg);
  const auto x = stft_forward(scene().stems[0], cfg);
  const Scm xx = scm_target(x), nn = scm_noise(y, x);
  for (auto _ : state) benchmark::DoNotOptimize(mvdr_weights(xx, nn, BeamformConfig{}));
}
BENCHMARK(BM_MvdrWeights)->Unit(benchmark::kMillisecond);

void BM_MvdrWeightsByChannels(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  RandomSceneOptions opt;
  opt.geometry = linear_geometry(c, 0.03);
  opt.duration_s = 2.0;
  const SceneMix mix = render_scene(random_scene(opt, 2));
  const auto cfg = StftConfig::standard();
  const auto y = stft_forward(mix.mixture, cfg);
  const auto x = stft_forward(mix.stems[0], cfg);
  const Scm xx = scm_target(x), nn = scm_noise(y, x);
  for (auto _ : state) benchmark::DoNotOptimize(mvdr_weights(xx, nn, BeamformConfig{}));
}
BENCHMARK(BM_MvdrWeightsByChannels)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_EnhanceOracle(benchmark::State& state) {
  const SceneMix& m = scene();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        enhance(m.mixture, OracleWienerMask{}, StftConfig::standard(), BeamformConfig{}, &m.stems[0]));
  }
}
BENCHMARK(BM_EnhanceOracle)->Unit(benchmark::kMillisecond);

void BM_SolveMixingMatrix(benchmark::State& state) {
  const auto& m = scene();
  Waveform sources(m.stems.size(), m.mixture.samples(), m.mixture.sample_rate());
  for (std::size_t s = 0; s < m.stems.size(); ++s) {
    for (std::size_t n = 0; n < m.mixture.samples(); ++n) sources.at(s, n) = m.stems[s].at(0, n);
  }
  const Waveform mixtures = m.mixture.select_channel(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_mixing_matrix(mixtures, sources, AssignmentConstraint::kUnconstrained));
  }
}
BENCHMARK(BM_SolveMixingMatrix)->Unit(benchmark::kMicrosecond);

void BM_SiSdr(benchmark::State& state) {
  const auto e = scene().mixture.channel(0);
  const auto r = scene().stems[0].channel(0);
  for (auto _ : state) benchmark::DoNotOptimize(si_sdr(e, r));
}
BENCHMARK(BM_SiSdr);

}  // namespace

BENCHMARK_MAIN();
