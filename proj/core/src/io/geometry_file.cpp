#include "uimvdr/io/geometry_file.hpp"

#include <sstream>

#include "bytes.hpp"
#include "uimvdr/error.hpp"
#include "uimvdr/io/records.hpp"

namespace uimvdr::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_geometry(const ArrayGeometry& geometry) {
  geometry.validate();
  std::string out = "# microphone array geometry, metres\n";
  out += "name = " + (geometry.name.empty() ? std::string("custom") : geometry.name) + "\n";
  for (const Vec3& p : geometry.mics) {
    out += "mic " + format_number(p.x) + " " + format_number(p.y) + " " +
           format_number(p.z) + "\n";
  }
  return out;
}

ArrayGeometry parse_geometry(std::string_view text) {
  ArrayGeometry g;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = "geometry line " + std::to_string(line_no) + ": ";
    if (const auto eq = line.find('='); eq != std::string_view::npos) {
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      require(key == "name", ErrorKind::kFormat,
              where + "unknown key '" + std::string(key) + "'");
      g.name = std::string(value);
      continue;
    }
    std::istringstream is{std::string(line)};
    std::string tag, xs, ys, zs, extra;
    is >> tag >> xs >> ys >> zs;
    require(tag == "mic" && !zs.empty() && !(is >> extra), ErrorKind::kFormat,
            where + "expected 'mic <x> <y> <z>'");
    g.mics.push_back({parse_number(xs), parse_number(ys), parse_number(zs)});
  }
  g.validate();
  return g;
}

ArrayGeometry read_geometry_file(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return parse_geometry(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void write_geometry_file(const std::filesystem::path& path,
                         const ArrayGeometry& geometry) {
  const std::string text = format_geometry(geometry);
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                     text.size()));
}

ArrayGeometry resolve_geometry(std::string_view name_or_path) {
  if (auto preset = geometry_preset(name_or_path)) return *preset;
  const std::filesystem::path path{std::string(name_or_path)};
  require(std::filesystem::exists(path), ErrorKind::kInvalidArgument,
          "unknown geometry '" + std::string(name_or_path) +
              "' (expected respeaker, kinect, 16sounds or a descriptor file)");
  return read_geometry_file(path);
}

}  // namespace uimvdr::io
