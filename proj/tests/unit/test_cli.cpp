// Copyright 2026 The lcdkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcd/cli.hpp"
#include "lcd/corpus.hpp"
#include "lcd/io_util.hpp"
#include "support/synth.hpp"

namespace lcd {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "lcd_cli_test";
    fs::remove_all(root_);
    fs::create_directories(root_);
    testing::WriteClassPools(root_ / "pools", 3, 4.0, 11);
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static std::string P(const fs::path& rel) { return (root_ / rel).string(); }

  static Outcome Synthesize(const std::string& out, const std::string& seed = "7") {
    return RunCli({"--seed", seed, "--out", P(out), "synthesize", "--pools", P("pools"),
                   "--count", "4", "--min-changes", "1", "--max-changes", "2"});
  }

  static inline fs::path root_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(RunCli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(RunCli({}).code, cli::kExitValidation);
  EXPECT_EQ(RunCli({"detect", "--bogus"}).code, cli::kExitValidation);
  EXPECT_EQ(RunCli({"frobnicate"}).code, cli::kExitValidation);
}

TEST_F(CliTest, SynthesizeNeedsSeed) {
  const Outcome o = RunCli({"--out", P("noseed"), "synthesize", "--pools", P("pools"), "--count", "2"});
  EXPECT_EQ(o.code, cli::kExitValidation);
  EXPECT_NE(o.err.find("seed"), std::string::npos);
}

TEST_F(CliTest, MissingPoolDirectoryWritesNothing) {
  const Outcome o = RunCli({"--seed", "1", "--out", P("nopool"), "synthesize", "--pools",
                            P("does_not_exist"), "--count", "2"});
  EXPECT_EQ(o.code, cli::kExitIo);
  EXPECT_FALSE(fs::exists(root_ / "nopool" / "annotations.tsv"));
  EXPECT_FALSE(fs::exists(root_ / "nopool" / "wav"));
}

TEST_F(CliTest, SynthesizeIsByteReproducible) {
  ASSERT_EQ(Synthesize("syn_a").code, cli::kExitOk);
  ASSERT_EQ(Synthesize("syn_b").code, cli::kExitOk);
  ASSERT_EQ(Synthesize("syn_c", "8").code, cli::kExitOk);
  const auto annots = ReadAnnotations(root_ / "syn_a" / "annotations.tsv");
  EXPECT_EQ(annots.size(), 4u);
  for (const Annotation& a : annots) {
    const auto n = a.change_points().size();
    EXPECT_GE(n, 1u);
    EXPECT_LE(n, 2u);
    const fs::path wav = root_ / "syn_a" / "wav" / (a.utt_id + ".wav");
    ASSERT_TRUE(fs::exists(wav));
    EXPECT_EQ(io::ReadFile(wav), io::ReadFile(root_ / "syn_b" / "wav" / (a.utt_id + ".wav")));
  }
  EXPECT_EQ(io::ReadFile(root_ / "syn_a" / "annotations.tsv"),
            io::ReadFile(root_ / "syn_b" / "annotations.tsv"));
  EXPECT_NE(io::ReadFile(root_ / "syn_a" / "annotations.tsv"),
            io::ReadFile(root_ / "syn_c" / "annotations.tsv"));
  EXPECT_TRUE(fs::exists(root_ / "syn_a" / "run.json"));
}

TEST_F(CliTest, DetectEvaluateChain) {
  ASSERT_EQ(Synthesize("chain").code, cli::kExitOk);
  const std::string manifest = P("chain/manifest.tsv"), annots = P("chain/annotations.tsv");
  const Outcome det = RunCli({"--out", P("chain/det"), "detect", "--manifest", manifest, "--N", "100"});
  ASSERT_EQ(det.code, cli::kExitOk) << det.err;
  ASSERT_TRUE(fs::exists(root_ / "chain/det/detections.tsv"));
  const Outcome ev = RunCli({"--out", P("chain/eval"), "evaluate", "--annotations", annots,
                             "--detections", P("chain/det/detections.tsv")});
  ASSERT_EQ(ev.code, cli::kExitOk) << ev.err;
  const std::string csv = io::ReadFile(root_ / "chain/eval/report.csv");
  EXPECT_NE(csv.find("idr,"), std::string::npos);
  EXPECT_NE(csv.find("collar_sec,1"), std::string::npos);

  // Annotations scored against themselves.
  std::string self;
  for (const Annotation& a : ReadAnnotations(annots)) {
    for (double t : a.change_points()) self += a.utt_id + "\t" + io::Fixed(t, 6) + "\t1.000000\n";
  }
  io::AtomicWrite(root_ / "chain/self.tsv", self);
  ASSERT_EQ(RunCli({"--out", P("chain/self"), "evaluate", "--annotations", annots,
                    "--detections", P("chain/self.tsv")}).code,
            cli::kExitOk);
  EXPECT_NE(io::ReadFile(root_ / "chain/self/report.csv").find("idr,100"), std::string::npos);
}

TEST_F(CliTest, TrainThenModelBasedDetect) {
  ASSERT_EQ(Synthesize("model").code, cli::kExitOk);
  const std::string manifest = P("model/manifest.tsv"), annots = P("model/annotations.tsv");
  const Outcome tr = RunCli({"--seed", "3", "--out", P("model/models"), "train", "--manifest",
                             manifest, "--annotations", annots, "--components", "8"});
  ASSERT_EQ(tr.code, cli::kExitOk) << tr.err;
  EXPECT_TRUE(fs::exists(root_ / "model/models/models.gmm"));
  const Outcome det = RunCli({"--out", P("model/det"), "detect", "--manifest", manifest, "--mode",
                              "embedding-cosine", "--models", P("model/models"), "--N", "100",
                              "--alpha", "1"});
  ASSERT_EQ(det.code, cli::kExitOk) << det.err;
  const Outcome missing = RunCli({"--out", P("model/det2"), "detect", "--manifest", manifest,
                                  "--mode", "embedding-cosine"});
  EXPECT_EQ(missing.code, cli::kExitValidation);
}

TEST_F(CliTest, ConfigFileSuppliesOptions) {
  ASSERT_EQ(Synthesize("cfg").code, cli::kExitOk);
  std::ofstream(root_ / "cfg/run.ini") << "[detect]\nN=100\nalpha=2\n";
  const Outcome o = RunCli({"--config", P("cfg/run.ini"), "--out", P("cfg/det"), "detect",
                            "--manifest", P("cfg/manifest.tsv")});
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  const std::string run = io::ReadFile(root_ / "cfg/det/run.json");
  EXPECT_NE(run.find("\"N\": \"100\""), std::string::npos) << run;
  EXPECT_EQ(RunCli({"--config", P("cfg/none.ini"), "detect"}).code, cli::kExitIo);
}

TEST_F(CliTest, MissingInputIsIoError) {
  EXPECT_EQ(RunCli({"--out", P("x"), "detect", "--manifest", P("nothing.tsv")}).code, cli::kExitIo);
}

}  // namespace
}  // namespace lcd
