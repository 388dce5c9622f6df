#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uimvdr/waveform.hpp"

namespace uimvdr::io {

enum class WavEncoding { kPcm16, kFloat32 };

// RIFF/WAVE with PCM16 or IEEE float32 samples (plain or extensible fmt),
// any channel count. PCM16 maps to [-1, 1) by 1/32768.
Waveform decode_wav(std::span<const std::uint8_t> bytes);
Waveform read_wav(const std::filesystem::path& path);

// PCM16 scales by 32768, rounds and clamps to [-32768, 32767]. Float32
// round-trips exactly for float-representable samples.
std::vector<std::uint8_t> encode_wav(const Waveform& wave, WavEncoding encoding);
void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace uimvdr::io
