#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"
#include "uimvdr/io/mask_file.hpp"
#include "uimvdr/io/records.hpp"
#include "uimvdr/io/wav.hpp"
#include "uimvdr/metrics.hpp"

namespace uimvdr {
namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Last output line parsed as a record.
io::Record last_record(const std::string& out) {
  std::string text = out;
  while (!text.empty() && text.back() == '\n') text.pop_back();
  return io::parse_record(text.substr(text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1));
}

class CliScene : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new test::TempDir("cli");
    const CliRun r = run({"simulate", "-o", dir_->str("scene"), "--seed", "3", "--duration", "2"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::string scene(const std::string& name) {
    return (dir_->path() / "scene" / name).string();
  }
  static test::TempDir* dir_;
};

test::TempDir* CliScene::dir_ = nullptr;

TEST_F(CliScene, SimulateIsDeterministicAndReplays) {
  const CliRun again = run({"simulate", "-o", dir_->str("again"), "--seed", "3", "--duration", "2"});
  ASSERT_EQ(again.code, cli::kExitOk) << again.err;
  EXPECT_EQ(test::file_bytes(scene("mixture.wav")),
            test::file_bytes(dir_->path() / "again" / "mixture.wav"));

  const CliRun replay = run({"simulate", "-o", dir_->str("replay"), "--manifest", scene("manifest.txt")});
  ASSERT_EQ(replay.code, cli::kExitOk) << replay.err;
  EXPECT_EQ(test::file_bytes(scene("mixture.wav")),
            test::file_bytes(dir_->path() / "replay" / "mixture.wav"));
  EXPECT_EQ(test::file_bytes(scene("stem_0.wav")),
            test::file_bytes(dir_->path() / "replay" / "stem_0.wav"));

  const auto rec = last_record(again.out);
  EXPECT_EQ(io::field(rec, "record"), "simulate");
  EXPECT_EQ(io::field(rec, "channels"), "4");
}

TEST_F(CliScene, EnhanceUnitMaskReturnsReference) {
  const std::string out = dir_->str("unit.wav");
  const CliRun r = run({"enhance", "-i", scene("mixture.wav"), "-o", out, "--mask", "unit",
                     "--ref-mic", "1"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Waveform y = io::read_wav(scene("mixture.wav"));
  const Waveform e = io::read_wav(out);
  ASSERT_EQ(e.channels(), 1u);
  EXPECT_LE(test::rel_l2(e.channel(0), y.channel(1)), 1e-6);
}

TEST_F(CliScene, EnhanceOracleImproves) {
  const std::string report = dir_->str("report.txt");
  const CliRun r = run({"enhance", "-i", scene("mixture.wav"), "-o", dir_->str("oracle.wav"),
                     "--target-stem", scene("stem_0.wav"), "--scene-id", "s3", "--report",
                     report});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const MetricReport m = io::parse_metric_record(r.out.substr(r.out.rfind("scene_id=")));
  EXPECT_EQ(m.scene_id, "s3");
  ASSERT_TRUE(m.si_sdri.has_value());
  EXPECT_GT(*m.si_sdri, 0.0);
  const auto bytes = test::file_bytes(report);
  EXPECT_FALSE(bytes.empty());
}

TEST_F(CliScene, EnhanceOracleWithoutTargetIsUsageError) {
  const CliRun r = run({"enhance", "-i", scene("mixture.wav"), "-o", dir_->str("x.wav")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("error code=usage"), std::string::npos) << r.err;
}

TEST_F(CliScene, EnhanceFromDumpedMaskFile) {
  const std::string mask = dir_->str("dumped.umsk");
  const CliRun a = run({"enhance", "-i", scene("mixture.wav"), "-o", dir_->str("a.wav"),
                     "--target-stem", scene("stem_0.wav"), "--dump-mask", mask});
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  const auto tensor = io::read_mask_file(mask).tensor;
  EXPECT_EQ(tensor.layers, 1u);
  EXPECT_EQ(tensor.bins, 513u);
  const CliRun b = run({"enhance", "-i", scene("mixture.wav"), "-o", dir_->str("b.wav"), "--mask",
                     "file:" + mask});
  ASSERT_EQ(b.code, cli::kExitOk) << b.err;
  // The file stores float32 values, so the outputs agree closely but not exactly.
  const Waveform wa = io::read_wav(dir_->str("a.wav"));
  const Waveform wb = io::read_wav(dir_->str("b.wav"));
  EXPECT_LE(test::rel_l2(wb.channel(0), wa.channel(0)), 1e-4);
}

TEST_F(CliScene, EvalOfMixtureHasZeroImprovement) {
  const CliRun r = run({"eval", "--estimate", scene("mixture.wav"), "--reference",
                     scene("stem_0.wav"), "--mixture", scene("mixture.wav")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const MetricReport m = io::parse_metric_record(r.out.substr(r.out.rfind("scene_id=")));
  EXPECT_EQ(m.si_sdri, 0.0);
}

TEST_F(CliScene, EvalLengthMismatch) {
  io::write_wav(dir_->path() / "short.wav", test::noise_waveform(1, 1, 100));
  const CliRun r = run({"eval", "--estimate", dir_->str("short.wav"), "--reference",
                     scene("stem_0.wav")});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("error code=shape_mismatch"), std::string::npos) << r.err;
}

TEST(Cli, MixitRecoversExactAssignment) {
  test::TempDir dir("mixit");
  const Waveform s0 = test::noise_waveform(1, 1, 8000);
  const Waveform s1 = test::noise_waveform(2, 1, 8000);
  const Waveform s2 = test::noise_waveform(3, 1, 8000);
  Waveform x1 = s0;
  x1 += s1;
  Waveform mixtures(2, 8000, 16000), sources(3, 8000, 16000);
  for (std::size_t n = 0; n < 8000; ++n) {
    mixtures.at(0, n) = x1.at(0, n);
    mixtures.at(1, n) = s2.at(0, n);
    sources.at(0, n) = s0.at(0, n);
    sources.at(1, n) = s1.at(0, n);
    sources.at(2, n) = s2.at(0, n);
  }
  io::write_wav(dir.path() / "mixtures.wav", mixtures);
  io::write_wav(dir.path() / "sources.wav", sources);
  for (std::string constraint : {"unconstrained", "weak-enhancement"}) {
    const CliRun r = run({"mixit", "--mixtures", dir.str("mixtures.wav"), "--sources",
                       dir.str("sources.wav"), "--constraint", constraint});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto rec = last_record(r.out);
    if (constraint == "unconstrained") {
      EXPECT_EQ(io::field(rec, "assignment"), "[[1,1,0],[0,0,1]]");
      EXPECT_LT(io::number_field(rec, "reconstruction_error"), 1e-6);
    } else {
      EXPECT_EQ(io::field(rec, "assignment").size(), std::string("[[0,1,1],[1,0,0]]").size());
    }
  }
}

TEST(Cli, MomWritesSumOfComponents) {
  test::TempDir dir("mom");
  io::write_wav(dir.path() / "t.wav", test::noise_waveform(1, 2, 1000));
  io::write_wav(dir.path() / "i0.wav", test::noise_waveform(2, 2, 1000));
  io::write_wav(dir.path() / "i1.wav", test::noise_waveform(3, 2, 1000));
  const CliRun r = run({"mom", "--target", dir.str("t.wav"), "--interference", dir.str("i0.wav"),
                     "--interference", dir.str("i1.wav"), "--seed", "4", "-o", dir.str("mom.wav"),
                     "--components-dir", dir.str("parts")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rec = last_record(r.out);
  EXPECT_EQ(io::field(rec, "record"), "mom");
  const int k = std::stoi(io::field(rec, "k"));
  EXPECT_GE(k, 2);
  EXPECT_LE(k, 4);
  const Waveform mom = io::read_wav(dir.path() / "mom.wav");
  EXPECT_EQ(mom.channels(), 2u);
  EXPECT_EQ(mom.samples(), 1000u);

  const CliRun bad = run({"mom", "--target", dir.str("t.wav"), "--interference", dir.str("i0.wav"),
                       "--k", "7", "-o", dir.str("x.wav")});
  EXPECT_NE(bad.code, cli::kExitOk);
}

TEST(Cli, UsageAndHelp) {
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  const CliRun help = run({"--help"});
  EXPECT_EQ(help.code, cli::kExitOk);
  EXPECT_NE((help.out + help.err).find("enhance"), std::string::npos);
  const CliRun missing = run({"eval", "--estimate", "/nonexistent.wav", "--reference", "/x.wav"});
  EXPECT_EQ(missing.code, cli::kExitUsage);
  EXPECT_NE(missing.err.find("error code=usage"), std::string::npos) << missing.err;
}

}  // namespace
}  // namespace uimvdr
