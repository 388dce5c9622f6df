#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include "uimvdr/error.hpp"
#include "uimvdr/io/geometry_file.hpp"
#include "uimvdr/io/manifest.hpp"
#include "uimvdr/io/mask_file.hpp"
#include "uimvdr/io/records.hpp"
#include "uimvdr/io/wav.hpp"
#include "uimvdr/metrics.hpp"
#include "uimvdr/mixit.hpp"
#include "uimvdr/pipeline.hpp"
#include "uimvdr/rng.hpp"
#include "uimvdr/scenario.hpp"

namespace uimvdr::cli {

namespace fs = std::filesystem;

namespace {

// Semantic command-line problems found after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void usage_require(bool condition, const std::string& message) {
  if (!condition) throw UsageError(message);
}

std::string one_line(std::string_view text) {
  std::string s(text);
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

void write_error(std::ostream& err, std::string_view code, std::string_view message) {
  err << "error code=" << code << " message=" << one_line(message) << "\n";
}

const std::map<std::string, io::WavEncoding> kEncodings{
    {"float32", io::WavEncoding::kFloat32}, {"pcm16", io::WavEncoding::kPcm16}};

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool verbose = false;

  void log(const std::string& line) const {
    if (verbose) err << line << "\n";
  }
};

void append_line(const fs::path& path, const std::string& line) {
  std::ofstream f(path, std::ios::app);
  require(static_cast<bool>(f), ErrorKind::kIo, "cannot open " + path.string());
  f << line << "\n";
  require(static_cast<bool>(f), ErrorKind::kIo, "cannot write " + path.string());
}

std::string join_numbers(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ",";
    s += io::format_number(values[i]);
  }
  return s;
}

std::string join_indices(const std::vector<std::size_t>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(values[i]);
  }
  return s.empty() ? "-" : s;
}

// Stacks every channel of every file, in order, into one waveform.
Waveform stack_channels(const std::vector<std::string>& paths) {
  std::vector<std::vector<double>> rows;
  int rate = 0;
  for (const auto& p : paths) {
    const Waveform w = io::read_wav(p);
    require(rate == 0 || w.sample_rate() == rate, ErrorKind::kShapeMismatch,
            p + " has a different sample rate");
    rate = w.sample_rate();
    for (std::size_t c = 0; c < w.channels(); ++c) {
      auto ch = w.channel(c);
      rows.emplace_back(ch.begin(), ch.end());
    }
  }
  return Waveform::from_channels(rows, rate);
}

std::span<const double> pick_channel(const Waveform& w, std::size_t c,
                                     const std::string& what) {
  if (w.channels() == 1) return w.channel(0);
  require(c < w.channels(), ErrorKind::kInvalidArgument,
          what + " has no channel " + std::to_string(c));
  return w.channel(c);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string out_dir;
  std::string manifest;
  std::uint64_t seed = 0;
  std::string geometry = "respeaker";
  double duration_s = 5.0;
  int sample_rate = 16000;
  std::size_t min_interferers = 1;
  std::size_t max_interferers = 3;
  double sdr_lo_db = -5.0;
  double sdr_hi_db = 5.0;
  std::size_t ref_mic = 0;
  std::string encoding = "float32";
  std::vector<std::string> sources;
};

// "role=target,kind=harmonic,az=45,el=0,gain=0" or with file=PATH instead
// of kind.
SourceDescription parse_source_spec(const std::string& spec) {
  SourceDescription src;
  bool have_az = false;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    usage_require(eq != std::string::npos, "--source item '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "role") {
      usage_require(value == "target" || value == "interferer",
                    "--source role must be target or interferer");
      src.target = value == "target";
    } else if (key == "kind") {
      const auto kind = parse_source_kind(value);
      usage_require(kind.has_value(), "--source kind must be harmonic or noise");
      src.kind = *kind;
    } else if (key == "file") {
      usage_require(!value.empty(), "--source file is empty");
      src.file = fs::absolute(value).lexically_normal().string();
    } else if (key == "az") {
      src.azimuth_deg = io::parse_number(value);
      have_az = true;
    } else if (key == "el") {
      src.elevation_deg = io::parse_number(value);
    } else if (key == "gain") {
      src.gain_db = io::parse_number(value);
    } else {
      throw UsageError("unknown --source key '" + key + "'");
    }
  }
  usage_require(have_az, "--source needs az=<degrees>");
  return src;
}

SceneDescription explicit_scene(const SimulateArgs& a) {
  SceneDescription scene;
  scene.geometry = io::resolve_geometry(a.geometry);
  scene.sample_rate = a.sample_rate;
  scene.samples = static_cast<std::size_t>(std::llround(a.duration_s * a.sample_rate));
  scene.seed = a.seed;
  scene.ref_mic = a.ref_mic;
  Rng rng(a.seed);
  for (const auto& spec : a.sources) {
    SourceDescription src = parse_source_spec(spec);
    src.seed = rng.next_u64();
    scene.sources.push_back(std::move(src));
  }
  std::size_t targets = 0;
  for (const auto& s : scene.sources) targets += s.target ? 1 : 0;
  usage_require(targets == 1 && scene.sources.front().target,
                "exactly one --source with role=target is required, and it must come first");
  return scene;
}

int simulate_command(const SimulateArgs& a, const Context& ctx) {
  io::SceneManifest manifest;
  fs::path base_dir;
  if (!a.manifest.empty()) {
    manifest = io::read_scene_manifest(a.manifest);
    base_dir = fs::path(a.manifest).parent_path();
    ctx.log("replaying " + a.manifest);
  } else {
    usage_require(a.duration_s > 0.0, "--duration must be positive");
    usage_require(a.sdr_lo_db <= a.sdr_hi_db, "--sdr-lo must not exceed --sdr-hi");
    if (a.sources.empty()) {
      RandomSceneOptions opt;
      opt.geometry = io::resolve_geometry(a.geometry);
      opt.sample_rate = a.sample_rate;
      opt.duration_s = a.duration_s;
      opt.min_interferers = a.min_interferers;
      opt.max_interferers = a.max_interferers;
      opt.input_sdr_lo_db = a.sdr_lo_db;
      opt.input_sdr_hi_db = a.sdr_hi_db;
      opt.ref_mic = a.ref_mic;
      manifest.scene = random_scene(opt, a.seed);
    } else {
      manifest.scene = explicit_scene(a);
    }
    manifest.encoding = a.encoding;
    for (std::size_t i = 0; i < manifest.scene.sources.size(); ++i) {
      manifest.stem_files.push_back("stem_" + std::to_string(i) + ".wav");
    }
  }
  const SceneDescription& scene = manifest.scene;
  require(scene.ref_mic < scene.geometry.size(), ErrorKind::kInvalidArgument,
          "reference microphone out of range");
  const auto enc = kEncodings.find(manifest.encoding);
  require(enc != kEncodings.end(), ErrorKind::kFormat,
          "unknown encoding '" + manifest.encoding + "'");

  const SceneMix mix = render_scene(scene, base_dir);
  manifest.input_si_sdr_db = input_si_sdr(mix, scene.ref_mic);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  io::write_wav(dir / manifest.mixture_file, mix.mixture, enc->second);
  for (std::size_t i = 0; i < mix.stems.size(); ++i) {
    io::write_wav(dir / manifest.stem_files[i], mix.stems[i], enc->second);
  }
  io::write_scene_manifest(dir / "manifest.txt", manifest);

  ctx.out << io::format_record({{"record", "simulate"},
                                {"seed", std::to_string(scene.seed)},
                                {"sources", std::to_string(scene.sources.size())},
                                {"channels", std::to_string(scene.geometry.size())},
                                {"input_si_sdr", io::format_number(manifest.input_si_sdr_db)},
                                {"out_dir", dir.string()}})
          << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- enhance

struct EnhanceArgs {
  std::string input;
  std::string output;
  std::string mask = "oracle-wiener";
  std::string target_stem;
  std::size_t ref_mic = 0;
  bool no_postmask = false;
  double postmask_floor = 0.3;
  double diag_load = 1e-6;
  double window_ms = 64.0;
  bool single_channel = false;
  double wiener_exponent = 2.0;
  double binary_threshold_db = 0.0;
  std::string report;
  std::string scene_id;
  std::string dump_mask;
  std::string encoding = "float32";
};

int enhance_command(const EnhanceArgs& a, const Context& ctx) {
  const Waveform mixture = io::read_wav(a.input);
  const StftConfig stft = StftConfig::from_ms(a.window_ms, mixture.sample_rate());

  MaskProvider provider;
  if (a.mask == "oracle-wiener") {
    provider = OracleWienerMask{a.wiener_exponent};
  } else if (a.mask == "oracle-binary") {
    provider = OracleBinaryMask{a.binary_threshold_db};
  } else if (a.mask == "unit") {
    provider = UnitMask{};
  } else if (a.mask.starts_with("file:")) {
    const auto read = io::read_mask_file(a.mask.substr(5));
    if (read.clamped > 0) {
      ctx.err << "warning mask_values_clamped=" << read.clamped << "\n";
    }
    require(read.tensor.layers >= 1, ErrorKind::kFormat, "mask file has no layers");
    provider = ExternalMask{read.tensor.layer(0)};
  } else {
    throw UsageError("--mask must be oracle-wiener, oracle-binary, unit or file:PATH");
  }
  validate(provider);
  usage_require(!needs_target(provider) || !a.target_stem.empty(),
                "--mask " + a.mask + " needs --target-stem");

  std::optional<Waveform> target;
  if (!a.target_stem.empty()) {
    target = io::read_wav(a.target_stem);
    require(target->sample_rate() == mixture.sample_rate() &&
                target->samples() == mixture.samples(),
            ErrorKind::kShapeMismatch,
            "target stem must match the input's sample rate and length");
    require(target->channels() == 1 || target->channels() == mixture.channels(),
            ErrorKind::kShapeMismatch,
            "target stem must be mono or have the input's channel count");
  }

  EnhanceOptions opt{stft, {}, a.single_channel};
  opt.beamform.ref_mic = a.ref_mic;
  opt.beamform.diagonal_loading = a.diag_load;
  opt.beamform.postmask_floor = a.postmask_floor;
  opt.beamform.postmask_enabled = !a.no_postmask;
  const EnhanceResult r =
      enhance_detailed(mixture, provider, opt, target ? &*target : nullptr);
  ctx.log(std::string("path=") + (r.beamformed ? "mvdr" : "mask-only"));

  const auto enc = kEncodings.at(a.encoding);
  io::write_wav(a.output, r.output, enc);
  if (!a.dump_mask.empty()) {
    io::write_mask_file(a.dump_mask, io::MaskTensor::from_masks(std::span(&r.mask, 1)));
  }

  if (target) {
    MetricReport report;
    report.scene_id = a.scene_id.empty() ? fs::path(a.input).stem().string() : a.scene_id;
    const auto ref = pick_channel(*target, a.ref_mic, "target stem");
    report.si_sdr = si_sdr(r.output.channel(0), ref);
    report.si_sdri = si_sdri(r.output.channel(0), ref,
                             pick_channel(mixture, a.ref_mic, "input"));
    const std::string line = io::format_metric_record(report);
    ctx.out << line << "\n";
    if (!a.report.empty()) append_line(a.report, line);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string estimate;
  std::string reference;
  std::string mixture;
  std::size_t ref_mic = 0;
  std::string scene_id;
  std::string report;
};

int eval_command(const EvalArgs& a, const Context& ctx) {
  const Waveform est = io::read_wav(a.estimate);
  const Waveform ref = io::read_wav(a.reference);
  require(est.samples() == ref.samples(), ErrorKind::kShapeMismatch,
          "estimate and reference differ in length");
  const auto r = pick_channel(ref, a.ref_mic, "reference");
  MetricReport report;
  report.scene_id = a.scene_id.empty() ? fs::path(a.estimate).stem().string() : a.scene_id;
  report.si_sdr = si_sdr(est.channel(0), r);
  if (!a.mixture.empty()) {
    const Waveform mix = io::read_wav(a.mixture);
    require(mix.samples() == ref.samples(), ErrorKind::kShapeMismatch,
            "mixture and reference differ in length");
    report.si_sdri = si_sdri(est.channel(0), r, pick_channel(mix, a.ref_mic, "mixture"));
  }
  const std::string line = io::format_metric_record(report);
  ctx.out << line << "\n";
  if (!a.report.empty()) append_line(a.report, line);
  return kExitOk;
}

// ---------------------------------------------------------------- mixit

struct MixitArgs {
  std::vector<std::string> mixtures;
  std::vector<std::string> sources;
  std::string constraint = "unconstrained";
  bool brute_force = false;
  double snr_max = 30.0;
  double gamma = 0.01;
  double beta = 0.5;
  double window_ms = 64.0;
};

int mixit_command(const MixitArgs& a, const Context& ctx) {
  const Waveform mixtures = stack_channels(a.mixtures);
  const Waveform sources = stack_channels(a.sources);
  require(mixtures.sample_rate() == sources.sample_rate() &&
              mixtures.samples() == sources.samples(),
          ErrorKind::kShapeMismatch, "mixtures and sources must share rate and length");
  const AssignmentConstraint constraint = a.constraint == "weak-enhancement"
                                              ? AssignmentConstraint::kWeakEnhancement
                                              : AssignmentConstraint::kUnconstrained;
  const LossConfig cfg{a.snr_max, a.gamma, a.beta};
  cfg.validate();

  const MixingMatrix m = a.brute_force
                             ? brute_force_mixing_matrix(mixtures, sources, constraint)
                             : solve_mixing_matrix(mixtures, sources, constraint);
  const StftConfig stft = StftConfig::from_ms(a.window_ms, sources.sample_rate());
  const auto spectrum = stft_forward(sources.select_channel(0), stft);
  const MixitLoss loss = mixit_loss(mixtures, sources, spectrum, m, cfg);

  ctx.out << io::format_record({{"assignment", m.to_string()},
                                {"loss", io::format_number(loss.loss)},
                                {"snr_term", io::format_number(loss.snr_term)},
                                {"energy_term", io::format_number(loss.energy_term)},
                                {"reconstruction_error",
                                 io::format_number(reconstruction_error(mixtures, sources, m))}})
          << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- mom

struct MomArgs {
  std::vector<std::string> targets;
  std::vector<std::string> interference;
  std::optional<std::size_t> k;
  double gain_lo_db = -5.0;
  double gain_hi_db = 5.0;
  std::uint64_t seed = 0;
  std::string output;
  std::string components_dir;
  std::string manifest;
  std::string encoding = "float32";
};

int mom_command(const MomArgs& a, const Context& ctx) {
  MomSpec spec;
  for (const auto& p : a.targets) spec.target_mixtures.push_back(io::read_wav(p));
  for (const auto& p : a.interference) spec.interference_mixtures.push_back(io::read_wav(p));
  spec.k = a.k;
  spec.gain_lo_db = a.gain_lo_db;
  spec.gain_hi_db = a.gain_hi_db;
  spec.seed = a.seed;
  const MomResult r = build_mom(spec);

  const auto enc = kEncodings.at(a.encoding);
  io::write_wav(a.output, r.mom, enc);
  if (!a.components_dir.empty()) {
    const fs::path dir(a.components_dir);
    fs::create_directories(dir);
    for (std::size_t i = 0; i < r.components.size(); ++i) {
      io::write_wav(dir / ("component_" + std::to_string(i) + ".wav"), r.components[i], enc);
    }
  }
  const std::string line = io::format_record(
      {{"record", "mom"},
       {"seed", std::to_string(a.seed)},
       {"k", std::to_string(r.components.size())},
       {"target_index", std::to_string(r.target_index)},
       {"interference_indices", join_indices(r.interference_indices)},
       {"gains_db", join_numbers(r.gains_db)},
       {"output", a.output}});
  ctx.out << line << "\n";
  if (!a.manifest.empty()) append_line(a.manifest, line);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mask-based multichannel speech enhancement with MVDR beamforming",
               "uimvdr"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  const auto encoding_check = CLI::IsMember({"float32", "pcm16"});

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Render a free-field array scene");
  c_sim->add_option("-o,--out-dir", sim.out_dir, "Output directory")->required();
  c_sim->add_option("--manifest", sim.manifest, "Replay a scene manifest");
  c_sim->add_option("--seed", sim.seed, "Random seed");
  c_sim->add_option("--geometry", sim.geometry,
                    "respeaker, kinect, 16sounds or a geometry file");
  c_sim->add_option("--duration", sim.duration_s, "Seconds")->check(CLI::PositiveNumber);
  c_sim->add_option("--sample-rate", sim.sample_rate)->check(CLI::Range(1000, 384000));
  c_sim->add_option("--min-interferers", sim.min_interferers)->check(CLI::Range(1, 7));
  c_sim->add_option("--max-interferers", sim.max_interferers)->check(CLI::Range(1, 7));
  c_sim->add_option("--sdr-lo", sim.sdr_lo_db, "Lowest input SI-SDR, dB");
  c_sim->add_option("--sdr-hi", sim.sdr_hi_db, "Highest input SI-SDR, dB");
  c_sim->add_option("--ref-mic", sim.ref_mic);
  c_sim->add_option("--encoding", sim.encoding)->check(encoding_check);
  c_sim->add_option("--source", sim.sources,
                    "role=target|interferer,kind=harmonic|noise|file=PATH,az=DEG[,el=DEG][,gain=DB]");

  EnhanceArgs enh;
  auto* c_enh = app.add_subcommand("enhance", "Mask, beamform and post-mask a recording");
  c_enh->add_option("-i,--input", enh.input, "Multichannel mixture WAV")
      ->required()
      ->check(CLI::ExistingFile);
  c_enh->add_option("-o,--output", enh.output, "Mono output WAV")->required();
  c_enh->add_option("--mask", enh.mask, "oracle-wiener, oracle-binary, unit or file:PATH");
  c_enh->add_option("--target-stem", enh.target_stem, "Ground-truth target image WAV")
      ->check(CLI::ExistingFile);
  c_enh->add_option("--ref-mic", enh.ref_mic);
  c_enh->add_flag("--no-postmask", enh.no_postmask);
  c_enh->add_option("--postmask-floor", enh.postmask_floor)->check(CLI::Range(0.0, 1.0));
  c_enh->add_option("--diag-load", enh.diag_load)->check(CLI::NonNegativeNumber);
  c_enh->add_option("--window-ms", enh.window_ms)->check(CLI::PositiveNumber);
  c_enh->add_flag("--single-channel", enh.single_channel, "Mask-only path");
  c_enh->add_option("--wiener-exponent", enh.wiener_exponent)->check(CLI::PositiveNumber);
  c_enh->add_option("--binary-threshold", enh.binary_threshold_db, "dB");
  c_enh->add_option("--report", enh.report, "Append metric records here");
  c_enh->add_option("--scene-id", enh.scene_id);
  c_enh->add_option("--dump-mask", enh.dump_mask, "Write the mask as a UMSK1 file");
  c_enh->add_option("--encoding", enh.encoding)->check(encoding_check);

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "SI-SDR and SI-SDRi of an estimate");
  c_eval->add_option("--estimate", ev.estimate)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--reference", ev.reference)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--mixture", ev.mixture)->check(CLI::ExistingFile);
  c_eval->add_option("--ref-mic", ev.ref_mic);
  c_eval->add_option("--scene-id", ev.scene_id);
  c_eval->add_option("--report", ev.report);

  MixitArgs mx;
  auto* c_mixit = app.add_subcommand("mixit", "Best mixing matrix and MixIT loss");
  c_mixit->add_option("--mixtures", mx.mixtures, "WAV files; every channel is a mixture")
      ->required()
      ->check(CLI::ExistingFile);
  c_mixit->add_option("--sources", mx.sources, "WAV files; every channel is a source")
      ->required()
      ->check(CLI::ExistingFile);
  c_mixit->add_option("--constraint", mx.constraint)
      ->check(CLI::IsMember({"unconstrained", "weak-enhancement"}));
  c_mixit->add_flag("--brute-force", mx.brute_force, "Exhaustive search");
  c_mixit->add_option("--snr-max", mx.snr_max)->check(CLI::NonNegativeNumber);
  c_mixit->add_option("--gamma", mx.gamma)->check(CLI::NonNegativeNumber);
  c_mixit->add_option("--beta", mx.beta)->check(CLI::PositiveNumber);
  c_mixit->add_option("--window-ms", mx.window_ms)->check(CLI::PositiveNumber);

  MomArgs mm;
  std::size_t k = 0;
  auto* c_mom = app.add_subcommand("mom", "Build a mixture of mixtures");
  c_mom->add_option("--target", mm.targets)->required()->check(CLI::ExistingFile);
  c_mom->add_option("--interference", mm.interference)->required()->check(CLI::ExistingFile);
  auto* k_opt = c_mom->add_option("--k", k, "Mixtures in the MoM")->check(CLI::Range(2, 4));
  c_mom->add_option("--gain-lo", mm.gain_lo_db);
  c_mom->add_option("--gain-hi", mm.gain_hi_db);
  c_mom->add_option("--seed", mm.seed);
  c_mom->add_option("-o,--output", mm.output)->required();
  c_mom->add_option("--components-dir", mm.components_dir);
  c_mom->add_option("--manifest", mm.manifest, "Append the draw record here");
  c_mom->add_option("--encoding", mm.encoding)->check(encoding_check);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    write_error(err, "usage", e.what());
    return kExitUsage;
  }

  const Context ctx{out, err, verbose};
  try {
    if (c_sim->parsed()) return simulate_command(sim, ctx);
    if (c_enh->parsed()) return enhance_command(enh, ctx);
    if (c_eval->parsed()) return eval_command(ev, ctx);
    if (c_mixit->parsed()) return mixit_command(mx, ctx);
    if (*k_opt) mm.k = k;
    return mom_command(mm, ctx);
  } catch (const UsageError& e) {
    write_error(err, "usage", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    write_error(err, error_kind_name(e.kind()), e.what());
    return kExitFailure;
  } catch (const fs::filesystem_error& e) {
    write_error(err, error_kind_name(ErrorKind::kIo), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    write_error(err, "internal", e.what());
    return kExitFailure;
  }
}

}  // namespace uimvdr::cli
