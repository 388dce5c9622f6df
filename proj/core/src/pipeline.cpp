#include "uimvdr/pipeline.hpp"

#include <optional>

#include "uimvdr/error.hpp"

namespace uimvdr {

EnhanceResult enhance_detailed(const Waveform& mixture,
                               const MaskProvider& provider,
                               const EnhanceOptions& options,
                               const Waveform* target) {
  options.beamform.validate();
  require(!mixture.empty(), ErrorKind::kInvalidArgument, "empty mixture");
  require(mixture.all_finite(), ErrorKind::kInvalidArgument,
          "mixture contains non-finite samples");
  const std::size_t ref = options.beamform.ref_mic;
  require(ref < mixture.channels(), ErrorKind::kInvalidArgument,
          "reference microphone out of range");

  const ComplexSpectrogram y = stft_forward(mixture, options.stft);
  std::optional<ComplexSpectrogram> x;
  if (needs_target(provider)) {
    require(target != nullptr, ErrorKind::kInvalidArgument,
            "oracle masks require the ground-truth target stem");
    require(target->samples() == mixture.samples() &&
                target->sample_rate() == mixture.sample_rate() &&
                (target->channels() == 1 ||
                 target->channels() == mixture.channels()),
            ErrorKind::kShapeMismatch, "target stem does not match mixture");
    x = stft_forward(*target, options.stft);
  }
  Mask mask = resolve_mask(provider, y, x ? &*x : nullptr, ref);

  const ComplexSpectrogram y_ref = y.select_channel(ref);
  const std::size_t len = mixture.samples();
  Waveform masked_ref = istft_inverse(apply_mask(y_ref, mask), options.stft, len);

  EnhanceResult result{masked_ref, masked_ref, mask, false};
  if (mixture.channels() < 2 || options.single_channel) return result;

  const ComplexSpectrogram xhat = apply_mask(y, mask);
  const Scm phi_xx = scm_target(xhat);
  const Scm phi_nn = scm_noise(y, xhat);
  const BeamformerWeights weights = mvdr_weights(phi_xx, phi_nn, options.beamform);
  ComplexSpectrogram beamformed = mvdr_apply(weights, y);
  if (options.beamform.postmask_enabled) {
    beamformed = post_mask(beamformed, mask, options.beamform.postmask_floor);
  }
  result.output = istft_inverse(beamformed, options.stft, len);
  result.beamformed = true;
  require(result.output.all_finite(), ErrorKind::kNumerical,
          "enhancement produced non-finite samples");
  return result;
}

Waveform enhance(const Waveform& mixture, const MaskProvider& provider,
                 const StftConfig& stft_cfg, const BeamformConfig& bf_cfg,
                 const Waveform* target) {
  EnhanceOptions options{stft_cfg, bf_cfg, false};
  return enhance_detailed(mixture, provider, options, target).output;
}

}  // namespace uimvdr
