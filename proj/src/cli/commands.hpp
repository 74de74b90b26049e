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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lcd/corpus.hpp"
#include "lcd/detect.hpp"
#include "lcd/evaluation.hpp"

namespace lcd::cli {

namespace fs = std::filesystem;

// Shared front-end flags.
struct FrontEndFlags {
  std::string features = "mfcc13";
  double vad_ratio = 0.06;
  bool features_given = false;

  FrontEndConfig ToConfig() const;
};

struct SynthesizeFlags {
  std::string pools;
  std::string labels;
  int count = 10;
  int min_changes = 1;
  int max_changes = 5;
  double crossfade = 0.010;
  bool no_trim = false;
  int rate = 16000;
  FrontEndFlags fe;
};

struct MaskFlags {
  std::string manifest;
  std::string annotations;
  int x = 50;
  int rate = 16000;
  FrontEndFlags fe;
};

struct FeaturizeFlags {
  std::string manifest;
  int rate = 16000;
  FrontEndFlags fe;
};

struct TrainFlags {
  std::string manifest;
  std::string annotations;
  int components = 32;
  int iters = 20;
  double relevance = 16.0;
  std::string extractor = "a-vector";
  int window = 200;
  int lda_dim = 0;
  bool wccn = false;
  bool length_norm = false;
  bool plda = false;
  int plda_iters = 10;
  int rate = 16000;
  FrontEndFlags fe;
};

struct DetectFlags {
  std::string manifest;
  std::string mode = "gaussian-kl";
  int N = 0;
  double alpha = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::string models;
  std::string embeddings;
  int embedding_dim = 0;
  int rate = 16000;
  FrontEndFlags fe;
};

struct EvaluateFlags {
  std::string annotations;
  std::string detections;
  double collar = 1.0;
};

struct DiscriminateFlags {
  std::string manifest;
  std::string annotations;
  std::vector<std::size_t> x;
  int rate = 16000;
  FrontEndFlags fe;
};

struct TrialsFlags {
  std::string manifest;
  std::string annotations;
  std::string models;
  int window = 200;
  std::size_t n_each = 2000;
  std::string scorer = "cosine";
  int rate = 16000;
  FrontEndFlags fe;
};

// Flags every subcommand accepts.
struct GlobalFlags {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  std::string out;
};

// Key/value record of a run for the JSON manifest. Path-valued inputs are
// recorded by content hash so that reruns into another directory match.
class RunRecord {
 public:
  explicit RunRecord(std::string command) : command_(std::move(command)) {}

  void Option(const std::string& key, const std::string& value) { options_[key] = value; }
  void Input(const std::string& key, const fs::path& path);
  void InputHash(const std::string& key, const std::string& hash) { inputs_[key] = hash; }
  void Output(const std::string& key, const std::string& value) { outputs_[key] = value; }

  std::string ConfigHash() const;
  ManifestFields Fields() const;
  std::string Json() const;

 private:
  std::string command_;
  std::map<std::string, std::string> options_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
};

// Content hash of a file, or of every file below a directory.
std::string HashPath(const fs::path& path);
// Hash of a manifest file together with every audio file it lists.
std::string HashManifest(const fs::path& path);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first failure by
// index is rethrown after all workers finish.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

void RequireExists(const std::string& path, const std::string& what);

int CmdSynthesize(const SynthesizeFlags& f, const GlobalFlags& g, std::ostream& out);
int CmdMask(const MaskFlags& f, const GlobalFlags& g, std::ostream& out);
int CmdFeaturize(const FeaturizeFlags& f, const GlobalFlags& g, std::ostream& out);
int CmdVad(const FeaturizeFlags& f, const GlobalFlags& g, std::ostream& out);
int CmdTrain(const TrainFlags& f, const GlobalFlags& g, std::ostream& out);
int CmdDetect(const DetectFlags& f, const GlobalFlags& g, std::ostream& out);
int CmdEvaluate(const EvaluateFlags& f, const GlobalFlags& g, std::ostream& out);
int CmdDiscriminate(const DiscriminateFlags& f, const GlobalFlags& g, std::ostream& out);
int CmdTrials(const TrialsFlags& f, const GlobalFlags& g, std::ostream& out);

}  // namespace lcd::cli
