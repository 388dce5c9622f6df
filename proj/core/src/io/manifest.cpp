#include "uimvdr/io/manifest.hpp"

#include <string>

#include "bytes.hpp"
#include "uimvdr/error.hpp"
#include "uimvdr/io/records.hpp"

namespace uimvdr::io {

namespace {

constexpr int kManifestVersion = 1;

std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty() && s.front() != '-', ErrorKind::kFormat,
          "not an unsigned integer: '" + s + "'");
  return v;
}

}  // namespace

std::string format_scene_manifest(const SceneManifest& m) {
  const SceneDescription& s = m.scene;
  require(m.stem_files.size() == s.sources.size(), ErrorKind::kInvalidArgument,
          "one stem file per source is required");
  std::string out;
  auto line = [&](const Record& r) { out += format_record(r) + "\n"; };
  line({{"record", "scene"},
        {"version", std::to_string(kManifestVersion)},
        {"seed", std::to_string(s.seed)},
        {"sample_rate", std::to_string(s.sample_rate)},
        {"samples", std::to_string(s.samples)},
        {"speed_of_sound", format_number(s.speed_of_sound)},
        {"ref_mic", std::to_string(s.ref_mic)},
        {"geometry", s.geometry.name.empty() ? "custom" : s.geometry.name},
        {"encoding", m.encoding},
        {"input_si_sdr_db", format_number(m.input_si_sdr_db)}});
  for (std::size_t i = 0; i < s.geometry.mics.size(); ++i) {
    const Vec3& p = s.geometry.mics[i];
    line({{"record", "mic"},
          {"index", std::to_string(i)},
          {"x", format_number(p.x)},
          {"y", format_number(p.y)},
          {"z", format_number(p.z)}});
  }
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    const SourceDescription& src = s.sources[i];
    line({{"record", "source"},
          {"index", std::to_string(i)},
          {"role", src.target ? "target" : "interferer"},
          {"kind", src.file.empty() ? std::string(source_kind_name(src.kind)) : "file"},
          {"seed", std::to_string(src.seed)},
          {"azimuth_deg", format_number(src.azimuth_deg)},
          {"elevation_deg", format_number(src.elevation_deg)},
          {"gain_db", format_number(src.gain_db)},
          {"file", src.file.empty() ? "-" : src.file},
          {"stem", m.stem_files[i]}});
  }
  line({{"record", "output"}, {"mixture", m.mixture_file}});
  return out;
}

SceneManifest parse_scene_manifest(std::string_view text) {
  SceneManifest m;
  SceneDescription& s = m.scene;
  bool have_scene = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const Record r = parse_record(line);
    const std::string& type = field(r, "record");
    if (type == "scene") {
      require(field(r, "version") == std::to_string(kManifestVersion),
              ErrorKind::kFormat, "unsupported manifest version");
      s.seed = parse_u64(field(r, "seed"));
      s.sample_rate = static_cast<int>(parse_u64(field(r, "sample_rate")));
      s.samples = parse_u64(field(r, "samples"));
      s.speed_of_sound = number_field(r, "speed_of_sound");
      s.ref_mic = parse_u64(field(r, "ref_mic"));
      s.geometry.name = field(r, "geometry");
      m.encoding = field(r, "encoding");
      m.input_si_sdr_db = number_field(r, "input_si_sdr_db");
      have_scene = true;
    } else if (type == "mic") {
      require(parse_u64(field(r, "index")) == s.geometry.mics.size(),
              ErrorKind::kFormat, "mic records out of order");
      s.geometry.mics.push_back(
          {number_field(r, "x"), number_field(r, "y"), number_field(r, "z")});
    } else if (type == "source") {
      require(parse_u64(field(r, "index")) == s.sources.size(), ErrorKind::kFormat,
              "source records out of order");
      SourceDescription src;
      src.target = field(r, "role") == "target";
      const std::string& kind = field(r, "kind");
      if (kind != "file") {
        const auto parsed = parse_source_kind(kind);
        require(parsed.has_value(), ErrorKind::kFormat, "unknown source kind " + kind);
        src.kind = *parsed;
      }
      src.seed = parse_u64(field(r, "seed"));
      src.azimuth_deg = number_field(r, "azimuth_deg");
      src.elevation_deg = number_field(r, "elevation_deg");
      src.gain_db = number_field(r, "gain_db");
      const std::string& file = field(r, "file");
      src.file = file == "-" ? "" : file;
      require(kind != "file" || !src.file.empty(), ErrorKind::kFormat,
              "file source without a path");
      s.sources.push_back(std::move(src));
      m.stem_files.push_back(field(r, "stem"));
    } else if (type == "output") {
      m.mixture_file = field(r, "mixture");
    } else {
      fail(ErrorKind::kFormat, "unknown manifest record '" + type + "'");
    }
  }
  require(have_scene, ErrorKind::kFormat, "manifest has no scene record");
  s.geometry.validate();
  require(!s.sources.empty(), ErrorKind::kFormat, "manifest lists no sources");
  return m;
}

SceneManifest read_scene_manifest(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return parse_scene_manifest(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void write_scene_manifest(const std::filesystem::path& path,
                          const SceneManifest& manifest) {
  const std::string text = format_scene_manifest(manifest);
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                     text.size()));
}

}  // namespace uimvdr::io
