#include "uimvdr/io/wav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bytes.hpp"
#include "uimvdr/error.hpp"

namespace uimvdr::io {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

Format parse_fmt(detail::ByteReader chunk) {
  Format fmt;
  fmt.tag = chunk.u16();
  fmt.channels = chunk.u16();
  fmt.sample_rate = chunk.u32();
  chunk.u32();  // byte rate
  chunk.u16();  // block align
  fmt.bits = chunk.u16();
  if (fmt.tag == kFormatExtensible) {
    require(chunk.remaining() >= 24, ErrorKind::kFormat,
            "truncated extensible fmt chunk");
    chunk.u16();  // cbSize
    chunk.u16();  // valid bits
    chunk.u32();  // channel mask
    fmt.tag = chunk.u16();  // leading bytes of the sub-format GUID
  }
  return fmt;
}

}  // namespace

Waveform decode_wav(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  require(in.remaining() >= 12 && in.tag(4) == "RIFF", ErrorKind::kFormat,
          "not a RIFF file");
  in.u32();
  require(in.tag(4) == "WAVE", ErrorKind::kFormat, "not a WAVE file");

  Format fmt;
  bool have_fmt = false;
  while (in.remaining() >= 8) {
    const std::string_view id = in.tag(4);
    const std::uint32_t size = in.u32();
    if (id == "fmt ") {
      fmt = parse_fmt(in.sub(size));
      have_fmt = true;
    } else if (id == "data") {
      require(have_fmt, ErrorKind::kFormat, "data chunk before fmt chunk");
      const bool pcm16 = fmt.tag == kFormatPcm && fmt.bits == 16;
      const bool float32 = fmt.tag == kFormatFloat && fmt.bits == 32;
      require(pcm16 || float32, ErrorKind::kFormat,
              "unsupported WAV encoding (need PCM16 or float32)");
      require(fmt.channels > 0 && fmt.sample_rate > 0 &&
                  fmt.sample_rate <= static_cast<std::uint32_t>(
                                         std::numeric_limits<int>::max()),
              ErrorKind::kFormat, "invalid channel count or sample rate");
      const std::size_t width = fmt.bits / 8;
      const std::size_t frame_bytes = width * fmt.channels;
      require(size % frame_bytes == 0, ErrorKind::kFormat,
              "data chunk is not a whole number of frames");
      detail::ByteReader data = in.sub(size);
      const std::size_t frames = size / frame_bytes;
      Waveform w(fmt.channels, frames, static_cast<int>(fmt.sample_rate));
      for (std::size_t n = 0; n < frames; ++n) {
        for (std::size_t c = 0; c < fmt.channels; ++c) {
          w.at(c, n) = pcm16 ? data.i16() / 32768.0 : static_cast<double>(data.f32());
        }
      }
      require(w.all_finite(), ErrorKind::kFormat, "WAV contains non-finite samples");
      return w;
    } else {
      in.skip(size);
    }
    if (size % 2 == 1 && in.remaining() > 0) in.skip(1);
  }
  fail(ErrorKind::kFormat, "WAV file has no data chunk");
}

Waveform read_wav(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(const Waveform& wave, WavEncoding encoding) {
  require(wave.channels() > 0 && wave.channels() <= 0xFFFF,
          ErrorKind::kInvalidArgument, "unsupported channel count");
  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const auto channels = static_cast<std::uint16_t>(wave.channels());
  const std::uint16_t block = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint64_t data_size = static_cast<std::uint64_t>(block) * wave.samples();
  require(data_size + 36 <= 0xFFFFFFFFull, ErrorKind::kInvalidArgument,
          "waveform too long for a RIFF file");

  detail::ByteWriter out;
  out.bytes("RIFF");
  out.u32(static_cast<std::uint32_t>(36 + data_size));
  out.bytes("WAVE");
  out.bytes("fmt ");
  out.u32(16);
  out.u16(pcm16 ? kFormatPcm : kFormatFloat);
  out.u16(channels);
  out.u32(static_cast<std::uint32_t>(wave.sample_rate()));
  out.u32(static_cast<std::uint32_t>(wave.sample_rate()) * block);
  out.u16(block);
  out.u16(bits);
  out.bytes("data");
  out.u32(static_cast<std::uint32_t>(data_size));
  for (std::size_t n = 0; n < wave.samples(); ++n) {
    for (std::size_t c = 0; c < wave.channels(); ++c) {
      const double v = wave.at(c, n);
      if (pcm16) {
        const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        out.i16(static_cast<std::int16_t>(q));
      } else {
        out.f32(static_cast<float>(v));
      }
    }
  }
  return out.take();
}

void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavEncoding encoding) {
  detail::write_file(path, encode_wav(wave, encoding));
}

}  // namespace uimvdr::io
