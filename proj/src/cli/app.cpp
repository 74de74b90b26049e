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

#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lcd/cli.hpp"
#include "lcd/error.hpp"

namespace lcd::cli {
namespace {

void AddFrontEnd(CLI::App* sub, FrontEndFlags& fe) {
  sub->add_option("--features", fe.features, "mfcc13, mfcc39, lpcc or sdc")
      ->check(CLI::IsMember({"mfcc13", "mfcc39", "lpcc", "sdc"}))
      ->each([&fe](const std::string&) { fe.features_given = true; });
  sub->add_option("--vad-ratio", fe.vad_ratio, "voiced if energy > ratio x mean energy");
}

void AddRate(CLI::App* sub, int& rate) {
  sub->add_option("--rate", rate, "expected sample rate in Hz");
}

int ExitCodeFor(ErrorCode code) {
  return code == ErrorCode::kIoError ? kExitIo : kExitValidation;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Language and speaker change detection toolkit", "lcd"};
  app.set_config("--config", "", "INI/TOML file with option values; flags win");
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--seed", g.seed, "run seed")
      ->each([&g](const std::string&) { g.seed_given = true; });
  app.add_option("--jobs", g.jobs, "utterances processed in parallel")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output directory");

  SynthesizeFlags syn;
  auto* s_syn = app.add_subcommand("synthesize", "stitch code-switched utterances from two pools");
  s_syn->add_option("--pools", syn.pools, "directory with one sub-directory of .wav per label");
  s_syn->add_option("--labels", syn.labels, "comma-separated pair of pool labels");
  s_syn->add_option("--count", syn.count, "utterances to generate");
  s_syn->add_option("--min-changes", syn.min_changes);
  s_syn->add_option("--max-changes", syn.max_changes);
  s_syn->add_option("--crossfade", syn.crossfade, "crossfade length in seconds");
  s_syn->add_flag("--no-trim", syn.no_trim, "keep leading and trailing silence of pool files");
  s_syn->add_option("--vad-ratio", syn.fe.vad_ratio, "endpointer energy ratio");
  AddRate(s_syn, syn.rate);

  MaskFlags mask;
  auto* s_mask = app.add_subcommand("mask", "Gaussian-masked stimuli around the first change");
  s_mask->add_option("--manifest", mask.manifest);
  s_mask->add_option("--annotations", mask.annotations);
  s_mask->add_option("--x", mask.x, "voiced frames kept on each side of the change");
  s_mask->add_option("--vad-ratio", mask.fe.vad_ratio);
  AddRate(s_mask, mask.rate);

  FeaturizeFlags feat;
  auto* s_feat = app.add_subcommand("featurize", "write feature dumps with voiced masks");
  s_feat->add_option("--manifest", feat.manifest);
  AddFrontEnd(s_feat, feat.fe);
  AddRate(s_feat, feat.rate);

  FeaturizeFlags vad;
  auto* s_vad = app.add_subcommand("vad", "write per-frame energy and voicing decisions");
  s_vad->add_option("--manifest", vad.manifest);
  s_vad->add_option("--vad-ratio", vad.fe.vad_ratio);
  AddRate(s_vad, vad.rate);

  TrainFlags tr;
  auto* s_tr = app.add_subcommand("train", "UBM, class models and optional back-end transforms");
  s_tr->add_option("--manifest", tr.manifest);
  s_tr->add_option("--annotations", tr.annotations);
  s_tr->add_option("--components", tr.components, "UBM mixture size");
  s_tr->add_option("--iters", tr.iters, "EM iterations");
  s_tr->add_option("--relevance", tr.relevance, "MAP relevance factor");
  s_tr->add_option("--extractor", tr.extractor)->check(CLI::IsMember({"u-vector", "a-vector"}));
  s_tr->add_option("--window", tr.window, "voiced frames per training embedding");
  s_tr->add_option("--lda-dim", tr.lda_dim, "train LDA to this dimension (0: off)");
  s_tr->add_flag("--wccn", tr.wccn);
  s_tr->add_flag("--length-norm", tr.length_norm);
  s_tr->add_flag("--plda", tr.plda);
  s_tr->add_option("--plda-iters", tr.plda_iters);
  AddFrontEnd(s_tr, tr.fe);
  AddRate(s_tr, tr.rate);

  DetectFlags det;
  auto* s_det = app.add_subcommand("detect", "find change points");
  s_det->add_option("--manifest", det.manifest);
  s_det->add_option("--mode", det.mode)
      ->check(CLI::IsMember({"gaussian-kl", "embedding-cosine", "embedding-plda"}));
  s_det->add_option("--N", det.N, "analysis window in voiced frames");
  s_det->add_option("--alpha", det.alpha, "threshold scale");
  s_det->add_option("--gamma", det.gamma, "minimum peak distance as a multiple of N");
  s_det->add_option("--delta", det.delta, "smoothing divisor");
  s_det->add_option("--models", det.models, "directory written by train");
  s_det->add_option("--embeddings", det.embeddings, "directory of <utt_id>.emb files");
  s_det->add_option("--embedding-dim", det.embedding_dim, "expected imported dimension");
  AddFrontEnd(s_det, det.fe);
  AddRate(s_det, det.rate);

  EvaluateFlags ev;
  auto* s_ev = app.add_subcommand("evaluate", "IDR, FAR, MDR and Dm against annotations");
  s_ev->add_option("--annotations", ev.annotations);
  s_ev->add_option("--detections", ev.detections);
  s_ev->add_option("--collar", ev.collar, "tolerance in seconds around each reference");

  DiscriminateFlags dis;
  auto* s_dis = app.add_subcommand("discriminate", "true versus false change distances per NVF");
  s_dis->add_option("--manifest", dis.manifest);
  s_dis->add_option("--annotations", dis.annotations);
  s_dis->add_option("--x", dis.x, "voiced frames per side")->delimiter(',');
  AddFrontEnd(s_dis, dis.fe);
  AddRate(s_dis, dis.rate);

  TrialsFlags tri;
  auto* s_tri = app.add_subcommand("trials", "within/between-class trials and EER");
  s_tri->add_option("--manifest", tri.manifest);
  s_tri->add_option("--annotations", tri.annotations);
  s_tri->add_option("--models", tri.models);
  s_tri->add_option("--window", tri.window);
  s_tri->add_option("--n-each", tri.n_each);
  s_tri->add_option("--scorer", tri.scorer)->check(CLI::IsMember({"cosine", "plda"}));
  AddFrontEnd(s_tri, tri.fe);
  AddRate(s_tri, tri.rate);

  std::vector<std::string> storage{"lcd"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << "\n";
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    const auto* cfg = app.get_option("--config");
    return (cfg->count() > 0 && dynamic_cast<const CLI::FileError*>(&e)) ? kExitIo
                                                                         : kExitValidation;
  }

  try {
    if (s_syn->parsed()) return CmdSynthesize(syn, g, out);
    if (s_mask->parsed()) return CmdMask(mask, g, out);
    if (s_feat->parsed()) return CmdFeaturize(feat, g, out);
    if (s_vad->parsed()) return CmdVad(vad, g, out);
    if (s_tr->parsed()) return CmdTrain(tr, g, out);
    if (s_det->parsed()) return CmdDetect(det, g, out);
    if (s_ev->parsed()) return CmdEvaluate(ev, g, out);
    if (s_dis->parsed()) return CmdDiscriminate(dis, g, out);
    if (s_tri->parsed()) return CmdTrials(tri, g, out);
  } catch (const Error& e) {
    err << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error [IoError]: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace lcd::cli
