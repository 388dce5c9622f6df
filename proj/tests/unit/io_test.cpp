#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "test_support.hpp"
#include "uimvdr/error.hpp"
#include "uimvdr/io/geometry_file.hpp"
#include "uimvdr/io/manifest.hpp"
#include "uimvdr/io/mask_file.hpp"
#include "uimvdr/io/records.hpp"
#include "uimvdr/io/wav.hpp"

namespace uimvdr {
namespace {

using namespace uimvdr::io;

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInvalidArgument;
}

void put_u16(std::vector<std::uint8_t>& b, std::size_t at, std::uint16_t v) {
  b[at] = v & 0xFF;
  b[at + 1] = v >> 8;
}

Waveform float_exact(std::uint64_t seed, std::size_t channels, std::size_t samples) {
  Waveform w = test::noise_waveform(seed, channels, samples);
  for (double& v : w.data()) v = static_cast<float>(v * 0.1);
  return w;
}

TEST(Wav, Float32RoundTripIsBitExact) {
  const Waveform w = float_exact(1, 3, 777);
  const Waveform back = decode_wav(encode_wav(w, WavEncoding::kFloat32));
  EXPECT_EQ(back, w);
  EXPECT_EQ(back.sample_rate(), 16000);
}

TEST(Wav, SixteenChannelsKeepOrder) {
  Waveform w(16, 10, 48000);
  for (std::size_t c = 0; c < 16; ++c) {
    for (std::size_t n = 0; n < 10; ++n) w.at(c, n) = static_cast<double>(c) / 32.0 + n / 1024.0;
  }
  test::TempDir dir("wav");
  write_wav(dir.path() / "a.wav", w);
  const Waveform back = read_wav(dir.path() / "a.wav");
  EXPECT_EQ(back, w);
  EXPECT_EQ(back.sample_rate(), 48000);
}

TEST(Wav, Pcm16QuantisationError) {
  Waveform w(1, 1600, 16000);
  for (std::size_t n = 0; n < w.samples(); ++n) {
    w.at(0, n) = 0.8 * std::sin(2.0 * std::numbers::pi * 440.0 * n / 16000.0);
  }
  const auto bytes = encode_wav(w, WavEncoding::kPcm16);
  EXPECT_EQ(bytes.size(), 44u + 2 * 1600);
  const Waveform back = decode_wav(bytes);
  EXPECT_LE(test::max_abs_diff(back.channel(0), w.channel(0)), 1.0 / 65536.0 + 1e-15);
}

TEST(Wav, Pcm16Clamps) {
  Waveform w(1, 3, 16000);
  w.at(0, 0) = 2.0;
  w.at(0, 1) = -2.0;
  w.at(0, 2) = -1.0;
  const Waveform back = decode_wav(encode_wav(w, WavEncoding::kPcm16));
  EXPECT_EQ(back.at(0, 0), 32767.0 / 32768.0);
  EXPECT_EQ(back.at(0, 1), -1.0);
  EXPECT_EQ(back.at(0, 2), -1.0);
}

TEST(Wav, MalformedInput) {
  const auto good = encode_wav(float_exact(2, 2, 50), WavEncoding::kFloat32);
  auto truncated = good;
  truncated.resize(good.size() - 3);
  EXPECT_EQ(kind_of([&] { decode_wav(truncated); }), ErrorKind::kFormat);

  auto magic = good;
  magic[0] = 'X';
  EXPECT_EQ(kind_of([&] { decode_wav(magic); }), ErrorKind::kFormat);

  auto pcm24 = good;
  put_u16(pcm24, 20, 1);   // format tag PCM
  put_u16(pcm24, 34, 24);  // bits per sample
  EXPECT_EQ(kind_of([&] { decode_wav(pcm24); }), ErrorKind::kFormat);

  EXPECT_EQ(kind_of([&] { decode_wav(std::vector<std::uint8_t>{}); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { read_wav("/nonexistent/x.wav"); }), ErrorKind::kIo);
}

TEST(Wav, ExtensibleHeader) {
  const Waveform w = float_exact(3, 2, 40);
  const auto plain = encode_wav(w, WavEncoding::kFloat32);
  // Rebuild with a 40-byte WAVE_FORMAT_EXTENSIBLE fmt chunk.
  std::vector<std::uint8_t> ext(plain.begin(), plain.begin() + 12);
  const std::uint8_t fmt_hdr[8] = {'f', 'm', 't', ' ', 40, 0, 0, 0};
  ext.insert(ext.end(), fmt_hdr, fmt_hdr + 8);
  ext.insert(ext.end(), plain.begin() + 20, plain.begin() + 36);
  put_u16(ext, 20, 0xFFFE);
  const std::uint8_t tail[24] = {22, 0, 32, 0, 3, 0, 0, 0, 3, 0, 0, 0,
                                 0, 0, 0x10, 0, 0x80, 0, 0, 0xAA, 0, 0x38, 0x9B, 0x71};
  ext.insert(ext.end(), tail, tail + 24);
  ext.insert(ext.end(), plain.begin() + 36, plain.end());
  const std::uint32_t riff = static_cast<std::uint32_t>(ext.size() - 8);
  std::memcpy(ext.data() + 4, &riff, 4);
  EXPECT_EQ(decode_wav(ext), w);
}

TEST(MaskFile, RoundTripAndLayout) {
  Mask a(3, 4, 0.25), b(3, 4, 1.0);
  a.set(2, 3, 0.75);
  const Mask layers[2] = {a, b};
  const MaskTensor t = MaskTensor::from_masks(layers);
  const auto bytes = encode_mask(t);
  ASSERT_EQ(bytes.size(), 19u + 4 * 24);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 5), "UMSK1");
  EXPECT_EQ(bytes[5], 1);
  EXPECT_EQ(bytes[6], 0);
  EXPECT_EQ(bytes[7], 3);   // frames
  EXPECT_EQ(bytes[11], 4);  // bins
  EXPECT_EQ(bytes[15], 2);  // layers
  float last_of_layer0 = 0.0f;
  std::memcpy(&last_of_layer0, bytes.data() + 19 + 4 * 11, 4);
  EXPECT_EQ(last_of_layer0, 0.75f);

  const auto r = decode_mask(bytes);
  EXPECT_EQ(r.clamped, 0u);
  EXPECT_EQ(r.tensor, t);
  EXPECT_EQ(r.tensor.layer(0)(2, 3), 0.75);
  EXPECT_EQ(r.tensor.layer(1)(0, 0), 1.0);
  EXPECT_THROW(r.tensor.layer(2), Error);

  test::TempDir dir("mask");
  write_mask_file(dir.path() / "m.umsk", t);
  EXPECT_EQ(read_mask_file(dir.path() / "m.umsk").tensor, t);
}

TEST(MaskFile, ClampsOutOfRangeValues) {
  MaskTensor t;
  t.frames = 1;
  t.bins = 4;
  t.layers = 1;
  t.values = {-0.5f, 1.5f, std::numeric_limits<float>::quiet_NaN(), 0.5f};
  const auto r = decode_mask(encode_mask(t));
  EXPECT_EQ(r.clamped, 3u);
  EXPECT_EQ(r.tensor.values, (std::vector<float>{0.0f, 1.0f, 0.0f, 0.5f}));
}

TEST(MaskFile, MalformedInput) {
  const Mask m(2, 2, 0.5);
  const auto good = encode_mask(MaskTensor::from_masks(std::span(&m, 1)));
  auto bad_magic = good;
  bad_magic[4] = '2';
  EXPECT_EQ(kind_of([&] { decode_mask(bad_magic); }), ErrorKind::kFormat);
  auto bad_version = good;
  bad_version[5] = 2;
  EXPECT_EQ(kind_of([&] { decode_mask(bad_version); }), ErrorKind::kFormat);
  auto short_payload = good;
  short_payload.pop_back();
  EXPECT_EQ(kind_of([&] { decode_mask(short_payload); }), ErrorKind::kFormat);
  auto long_payload = good;
  long_payload.push_back(0);
  EXPECT_EQ(kind_of([&] { decode_mask(long_payload); }), ErrorKind::kFormat);
  const Mask other(3, 2, 0.5);
  const Mask mixed[2] = {m, other};
  EXPECT_THROW(MaskTensor::from_masks(mixed), Error);
}

TEST(Records, NumbersRoundTrip) {
  for (double v : {0.0, -0.0, 1.0, 0.1, -3.25, 1e-300, 123456789.123456789, 15.37,
                   std::numbers::pi}) {
    EXPECT_EQ(parse_number(format_number(v)), v) << format_number(v);
  }
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_TRUE(std::isnan(parse_number(format_number(std::nan("")))));
  EXPECT_THROW(parse_number("1.5x"), Error);
  EXPECT_THROW(parse_number(""), Error);
}

TEST(Records, ParseAndFormat) {
  const Record r = parse_record("  a=1   b=two\tc=-3 ");
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(field(r, "b"), "two");
  EXPECT_EQ(number_field(r, "c"), -3.0);
  EXPECT_EQ(find_field(r, "d"), nullptr);
  EXPECT_EQ(kind_of([&] { field(r, "d"); }), ErrorKind::kFormat);
  EXPECT_EQ(format_record(r), "a=1 b=two c=-3");
  EXPECT_THROW(parse_record("a=1 b"), Error);
  EXPECT_THROW(parse_record("=1"), Error);
  EXPECT_THROW(parse_record("a="), Error);
  EXPECT_THROW(format_record({{"a b", "1"}}), Error);
}

TEST(Records, MetricRecord) {
  MetricReport m{"scene7", 12.5, 3.25};
  EXPECT_EQ(format_metric_record(m), "scene_id=scene7 si_sdr=12.5 si_sdri=3.25");
  const MetricReport back = parse_metric_record(format_metric_record(m));
  EXPECT_EQ(back.scene_id, "scene7");
  EXPECT_EQ(back.si_sdr, 12.5);
  EXPECT_EQ(back.si_sdri, 3.25);
  EXPECT_EQ(format_metric_record({"", -1.0, std::nullopt}), "scene_id=- si_sdr=-1");
  EXPECT_FALSE(parse_metric_record("scene_id=x si_sdr=2").si_sdri.has_value());
}

TEST(GeometryFile, PresetsRoundTrip) {
  for (const auto& g : {respeaker_geometry(), kinect_geometry(), sixteen_sounds_geometry()}) {
    EXPECT_EQ(parse_geometry(format_geometry(g)), g);
  }
  test::TempDir dir("geom");
  write_geometry_file(dir.path() / "a.txt", kinect_geometry());
  EXPECT_EQ(read_geometry_file(dir.path() / "a.txt"), kinect_geometry());
  EXPECT_EQ(resolve_geometry(dir.str("a.txt")), kinect_geometry());
  EXPECT_EQ(resolve_geometry("respeaker"), respeaker_geometry());
  EXPECT_THROW(resolve_geometry("no_such_array"), Error);
}

TEST(GeometryFile, CommentsAndErrors) {
  const ArrayGeometry g = parse_geometry(
      "# pair\nname = pair   # two mics\n\n  mic 0 0 0\nmic 0.1 0 0 # right\n");
  EXPECT_EQ(g.name, "pair");
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.mics[1].x, 0.1);
  EXPECT_THROW(parse_geometry("mic 0 0\n"), Error);
  EXPECT_THROW(parse_geometry("mic 0 0 0 0\n"), Error);
  EXPECT_THROW(parse_geometry("mic 0 zero 0\n"), Error);
  EXPECT_THROW(parse_geometry("colour = red\nmic 0 0 0\n"), Error);
  EXPECT_THROW(parse_geometry("# empty\n"), Error);
  EXPECT_THROW(parse_geometry("mic 0 0 0\nmic 0 0 0\n"), Error);
}

SceneManifest sample_manifest() {
  SceneManifest m;
  m.scene.geometry = respeaker_geometry();
  m.scene.samples = 32000;
  m.scene.seed = 42;
  m.scene.ref_mic = 1;
  m.scene.sources.push_back({true, SourceKind::kHarmonic, 1234567890123ull, "", 45.0, 0.0, 0.0});
  m.scene.sources.push_back({false, SourceKind::kNoise, 7, "", 270.0, 12.5, -2.0 / 3.0});
  m.scene.sources.push_back({false, SourceKind::kHarmonic, 0, "voice.wav", 0.1, 0.0, 1.5});
  m.stem_files = {"stem_0.wav", "stem_1.wav", "stem_2.wav"};
  m.input_si_sdr_db = -1.234;
  return m;
}

void expect_same_scene(const SceneDescription& a, const SceneDescription& b) {
  EXPECT_EQ(a.geometry.mics, b.geometry.mics);
  EXPECT_EQ(a.sample_rate, b.sample_rate);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.speed_of_sound, b.speed_of_sound);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.ref_mic, b.ref_mic);
  ASSERT_EQ(a.sources.size(), b.sources.size());
  for (std::size_t i = 0; i < a.sources.size(); ++i) {
    const auto &x = a.sources[i], &y = b.sources[i];
    EXPECT_EQ(x.target, y.target);
    EXPECT_EQ(x.file, y.file);
    if (x.file.empty()) {
      EXPECT_EQ(x.kind, y.kind);
      EXPECT_EQ(x.seed, y.seed);
    }
    EXPECT_EQ(x.azimuth_deg, y.azimuth_deg);
    EXPECT_EQ(x.elevation_deg, y.elevation_deg);
    EXPECT_EQ(x.gain_db, y.gain_db);
  }
}

TEST(Manifest, RoundTrip) {
  const SceneManifest m = sample_manifest();
  const std::string text = format_scene_manifest(m);
  const SceneManifest back = parse_scene_manifest(text);
  expect_same_scene(back.scene, m.scene);
  EXPECT_EQ(back.stem_files, m.stem_files);
  EXPECT_EQ(back.mixture_file, "mixture.wav");
  EXPECT_EQ(format_scene_manifest(back), text);

  test::TempDir dir("manifest");
  write_scene_manifest(dir.path() / "manifest.txt", m);
  expect_same_scene(read_scene_manifest(dir.path() / "manifest.txt").scene, m.scene);
}

TEST(Manifest, RandomSceneRoundTrip) {
  RandomSceneOptions opt;
  opt.duration_s = 0.5;
  SceneManifest m;
  m.scene = random_scene(opt, 11);
  for (std::size_t i = 0; i < m.scene.sources.size(); ++i) {
    m.stem_files.push_back("stem_" + std::to_string(i) + ".wav");
  }
  const SceneManifest back = parse_scene_manifest(format_scene_manifest(m));
  expect_same_scene(back.scene, m.scene);
  EXPECT_EQ(render_scene(back.scene).mixture, render_scene(m.scene).mixture);
}

TEST(Manifest, Errors) {
  SceneManifest m = sample_manifest();
  m.stem_files.pop_back();
  EXPECT_THROW(format_scene_manifest(m), Error);

  const std::string text = format_scene_manifest(sample_manifest());
  EXPECT_THROW(parse_scene_manifest(""), Error);
  EXPECT_THROW(parse_scene_manifest("record=bogus\n" + text), Error);
  std::string wrong_version = text;
  wrong_version.replace(wrong_version.find("version=1"), 9, "version=9");
  EXPECT_THROW(parse_scene_manifest(wrong_version), Error);
  std::string bad_kind = text;
  bad_kind.replace(bad_kind.find("kind=noise"), 10, "kind=brown");
  EXPECT_THROW(parse_scene_manifest(bad_kind), Error);
  EXPECT_EQ(kind_of([] { read_scene_manifest("/nonexistent/manifest.txt"); }), ErrorKind::kIo);
}

}  // namespace
}  // namespace uimvdr
