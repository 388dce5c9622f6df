#include "uimvdr/io/mask_file.hpp"

#include <algorithm>
#include <cmath>

#include "bytes.hpp"
#include "uimvdr/error.hpp"

namespace uimvdr::io {

namespace {
constexpr std::string_view kMagic = "UMSK1";
}

Mask MaskTensor::layer(std::size_t index) const {
  require(index < layers, ErrorKind::kInvalidArgument, "mask layer out of range");
  const std::size_t cells = static_cast<std::size_t>(frames) * bins;
  std::vector<double> v(cells);
  for (std::size_t i = 0; i < cells; ++i) v[i] = values[index * cells + i];
  return Mask(frames, bins, std::move(v));
}

MaskTensor MaskTensor::from_masks(std::span<const Mask> masks) {
  require(!masks.empty(), ErrorKind::kInvalidArgument, "no mask layers");
  MaskTensor t;
  t.frames = static_cast<std::uint32_t>(masks.front().frames());
  t.bins = static_cast<std::uint32_t>(masks.front().bins());
  t.layers = static_cast<std::uint32_t>(masks.size());
  for (const Mask& m : masks) {
    require(m.frames() == t.frames && m.bins() == t.bins,
            ErrorKind::kShapeMismatch, "mask layers differ in shape");
    for (double v : m.values()) t.values.push_back(static_cast<float>(v));
  }
  return t;
}

std::vector<std::uint8_t> encode_mask(const MaskTensor& tensor) {
  const std::size_t expected =
      static_cast<std::size_t>(tensor.frames) * tensor.bins * tensor.layers;
  require(tensor.values.size() == expected, ErrorKind::kShapeMismatch,
          "mask payload does not match its dimensions");
  detail::ByteWriter out;
  out.bytes(kMagic);
  out.u16(kMaskFileVersion);
  out.u32(tensor.frames);
  out.u32(tensor.bins);
  out.u32(tensor.layers);
  for (float v : tensor.values) out.f32(v);
  return out.take();
}

MaskReadResult decode_mask(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  require(in.remaining() >= kMagic.size() && in.tag(kMagic.size()) == kMagic,
          ErrorKind::kFormat, "not a UMSK1 mask file");
  const std::uint16_t version = in.u16();
  require(version == kMaskFileVersion, ErrorKind::kFormat,
          "unsupported mask file version " + std::to_string(version));
  MaskReadResult result;
  MaskTensor& t = result.tensor;
  t.frames = in.u32();
  t.bins = in.u32();
  t.layers = in.u32();
  const std::uint64_t count =
      static_cast<std::uint64_t>(t.frames) * t.bins * t.layers;
  require(count * 4 == in.remaining(), ErrorKind::kFormat,
          "mask payload length does not match T*F*S");
  t.values.resize(count);
  for (auto& v : t.values) {
    float x = in.f32();
    if (std::isnan(x) || x < 0.0f || x > 1.0f) {
      x = std::isnan(x) ? 0.0f : std::clamp(x, 0.0f, 1.0f);
      ++result.clamped;
    }
    v = x;
  }
  return result;
}

void write_mask_file(const std::filesystem::path& path, const MaskTensor& tensor) {
  detail::write_file(path, encode_mask(tensor));
}

MaskReadResult read_mask_file(const std::filesystem::path& path) {
  return decode_mask(detail::read_file(path));
}

}  // namespace uimvdr::io
