#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uimvdr/scenario.hpp"

namespace uimvdr::io {

// Scene manifest: one key=value record per line, the first token naming the
// record type.
//
//   record=scene version=1 seed=7 sample_rate=16000 samples=80000
//       speed_of_sound=343 ref_mic=0 geometry=respeaker encoding=float32
//   record=mic index=0 x=0.02285 y=0.02285 z=0
//   record=source index=0 role=target kind=harmonic seed=... azimuth_deg=45
//       elevation_deg=0 gain_db=0 file=- stem=stem_0.wav
//   record=output mixture=mixture.wav
//
// (wrapped here for width; each record is a single line). Numbers use the
// shortest round-trip decimal form, so a manifest replays bit-exactly.
struct SceneManifest {
  SceneDescription scene;
  std::string encoding = "float32";
  std::string mixture_file = "mixture.wav";
  std::vector<std::string> stem_files;
  double input_si_sdr_db = 0.0;  // informational
};

std::string format_scene_manifest(const SceneManifest& manifest);
SceneManifest parse_scene_manifest(std::string_view text);

SceneManifest read_scene_manifest(const std::filesystem::path& path);
void write_scene_manifest(const std::filesystem::path& path,
                          const SceneManifest& manifest);

}  // namespace uimvdr::io
