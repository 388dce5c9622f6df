#pragma once

#include <optional>

#include "uimvdr/beamforming.hpp"
#include "uimvdr/masking.hpp"
#include "uimvdr/stft.hpp"
#include "uimvdr/waveform.hpp"

namespace uimvdr {

struct EnhanceOptions {
  StftConfig stft = StftConfig::standard();
  BeamformConfig beamform;
  // Skip beamforming even when several channels are available.
  bool single_channel = false;
};

struct EnhanceResult {
  Waveform output;         // pipeline output (beamformed when C >= 2)
  Waveform masked_ref;     // istft(M * Y_ref), the mask-only estimate
  Mask mask;
  bool beamformed = false;
};

// STFT -> mask on the reference channel -> mask applied to every channel ->
// target/noise SCMs -> MVDR -> optional post-mask -> ISTFT. `target` is the
// ground-truth target image, needed only by oracle mask providers.
EnhanceResult enhance_detailed(const Waveform& mixture,
                               const MaskProvider& provider,
                               const EnhanceOptions& options,
                               const Waveform* target = nullptr);

// Mono enhanced signal with the same length as `mixture`.
Waveform enhance(const Waveform& mixture, const MaskProvider& provider,
                 const StftConfig& stft_cfg, const BeamformConfig& bf_cfg,
                 const Waveform* target = nullptr);

}  // namespace uimvdr
