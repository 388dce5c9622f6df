#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "uimvdr/scene.hpp"

namespace uimvdr::io {

// Geometry descriptor, one item per line, '#' starts a comment:
//
//   name = respeaker
//   mic 0.02285 0.02285 0
//   mic -0.02285 0.02285 0
//
// Coordinates are metres; microphone order is channel order.
std::string format_geometry(const ArrayGeometry& geometry);
ArrayGeometry parse_geometry(std::string_view text);

ArrayGeometry read_geometry_file(const std::filesystem::path& path);
void write_geometry_file(const std::filesystem::path& path,
                         const ArrayGeometry& geometry);

// A preset name ("respeaker", "kinect", "16sounds") or a descriptor path.
ArrayGeometry resolve_geometry(std::string_view name_or_path);

}  // namespace uimvdr::io
