#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uimvdr/masking.hpp"

namespace uimvdr::io {

// UMSK1 mask tensor:
//   bytes 0-4   magic "UMSK1"
//   bytes 5-6   version, u16 little-endian (1)
//   bytes 7-18  frames T, bins F, layers S, each u32 little-endian
//   payload     T*F*S float32 little-endian, layer-major, then t outer, f inner
// Layer 0 is the target.
struct MaskTensor {
  std::uint32_t frames = 0;
  std::uint32_t bins = 0;
  std::uint32_t layers = 0;
  std::vector<float> values;

  float at(std::size_t layer, std::size_t t, std::size_t f) const {
    return values[(layer * frames + t) * bins + f];
  }
  Mask layer(std::size_t index) const;
  static MaskTensor from_masks(std::span<const Mask> masks);

  friend bool operator==(const MaskTensor&, const MaskTensor&) = default;
};

inline constexpr std::uint16_t kMaskFileVersion = 1;

struct MaskReadResult {
  MaskTensor tensor;
  // Values outside [0, 1] (or NaN) that were clamped on read.
  std::size_t clamped = 0;
};

std::vector<std::uint8_t> encode_mask(const MaskTensor& tensor);
MaskReadResult decode_mask(std::span<const std::uint8_t> bytes);

void write_mask_file(const std::filesystem::path& path, const MaskTensor& tensor);
MaskReadResult read_mask_file(const std::filesystem::path& path);

}  // namespace uimvdr::io
