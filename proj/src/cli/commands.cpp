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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "commands.hpp"
#include "lcd/audio.hpp"
#include "lcd/cli.hpp"
#include "lcd/backend.hpp"
#include "lcd/error.hpp"
#include "lcd/gaussian.hpp"
#include "lcd/io_util.hpp"
#include "lcd/rng.hpp"

namespace lcd::cli {
namespace {

void RequireSeed(const GlobalFlags& g, const char* command) {
  if (!g.seed_given) {
    Fail(ErrorCode::kInvalidArgument, std::string(command) + " needs --seed");
  }
}

void RequireOut(const GlobalFlags& g) {
  if (g.out.empty()) Fail(ErrorCode::kInvalidArgument, "--out is required");
}

void RecordFrontEnd(RunRecord& rec, const FrontEndFlags& fe) {
  rec.Option("features", fe.features);
  rec.Option("vad_ratio", io::Exact(fe.vad_ratio));
}

std::string UttName(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "utt%04d", i);
  return buf;
}

std::map<std::string, Annotation> AnnotationsById(const std::string& path) {
  std::map<std::string, Annotation> m;
  for (Annotation& a : ReadAnnotations(path)) {
    const std::string id = a.utt_id;
    m.emplace(id, std::move(a));
  }
  return m;
}

AudioBuffer LoadAudio(const ManifestEntry& e, int rate) {
  AudioBuffer buf = ReadWav(e.wav_path, rate);
  buf.id = e.utt_id;
  return buf;
}

const Annotation& FindAnnotation(const std::map<std::string, Annotation>& annots,
                                 const std::string& utt_id) {
  const auto it = annots.find(utt_id);
  if (it == annots.end()) {
    Fail(ErrorCode::kFormatError, "no annotation for utterance " + utt_id);
  }
  return it->second;
}

// Voiced rows of one utterance split into runs of equal label.
std::vector<LabeledStream> SplitByLabel(const FeatureMatrix& voiced, const Annotation& a) {
  std::vector<LabeledStream> out;
  std::size_t begin = 0;
  while (begin < voiced.num_frames) {
    const std::string& label = a.LabelAt(voiced.frame_center_sec(begin));
    std::size_t end = begin + 1;
    while (end < voiced.num_frames && a.LabelAt(voiced.frame_center_sec(end)) == label) ++end;
    LabeledStream s;
    s.label = label;
    s.voiced = FeatureMatrix(end - begin, voiced.dim, voiced.kind, voiced.frame_len_sec,
                             voiced.hop_sec);
    std::copy(voiced.data.begin() + static_cast<std::ptrdiff_t>(begin * voiced.dim),
              voiced.data.begin() + static_cast<std::ptrdiff_t>(end * voiced.dim),
              s.voiced.data.begin());
    out.push_back(std::move(s));
    begin = end;
  }
  return out;
}

std::vector<LabeledStream> LoadLabeledStreams(const std::string& manifest,
                                              const std::string& annotations,
                                              const FrontEndFlags& fe, int rate, int jobs) {
  const auto entries = ReadManifest(manifest);
  const auto annots = AnnotationsById(annotations);
  std::vector<std::vector<LabeledStream>> per(entries.size());
  const FrontEndConfig cfg = fe.ToConfig();
  ParallelFor(entries.size(), jobs, [&](std::size_t i) {
    const AudioBuffer buf = LoadAudio(entries[i], rate);
    per[i] = SplitByLabel(VoicedFeatures(buf, cfg), FindAnnotation(annots, entries[i].utt_id));
  });
  std::vector<LabeledStream> out;
  for (auto& v : per) {
    for (LabeledStream& s : v) out.push_back(std::move(s));
  }
  return out;
}

FeatureMatrix Concatenate(const std::vector<const LabeledStream*>& streams) {
  std::size_t rows = 0;
  for (const LabeledStream* s : streams) rows += s->voiced.num_frames;
  FeatureMatrix m(rows, streams.front()->voiced.dim, streams.front()->voiced.kind);
  std::size_t off = 0;
  for (const LabeledStream* s : streams) {
    std::copy(s->voiced.data.begin(), s->voiced.data.end(),
              m.data.begin() + static_cast<std::ptrdiff_t>(off));
    off += s->voiced.data.size();
  }
  return m;
}

// Trained model directory: GMMs, optional transforms and a description.
struct ModelBundle {
  DetectorModels models;
  std::vector<std::string> labels;
  std::string features;
  int window = 200;
};

ModelBundle LoadModelDir(const fs::path& dir) {
  ModelBundle b;
  const auto desc = nlohmann::json::parse(io::ReadFile(dir / "backend.json"), nullptr, false);
  if (desc.is_discarded() || !desc.is_object()) {
    Fail(ErrorCode::kFormatError, (dir / "backend.json").string() + ": not a JSON object");
  }
  b.models.extractor = ParseExtractorKind(desc.value("extractor", std::string("a-vector")));
  b.features = desc.value("features", std::string("mfcc13"));
  b.window = desc.value("window", 200);
  for (NamedGmm& g : ReadGmms(dir / "models.gmm")) {
    if (g.label.empty()) {
      b.models.ubm = std::move(g.gmm);
    } else {
      b.labels.push_back(g.label);
      b.models.class_models.push_back(std::move(g.gmm));
    }
  }
  if (desc.value("lda", false)) b.models.backend.lda = ReadMatrix("LDA1", dir / "lda.mat");
  if (desc.value("wccn", false)) b.models.backend.wccn = ReadMatrix("WCCN1", dir / "wccn.mat");
  b.models.backend.length_normalize = desc.value("length_normalize", false);
  if (desc.value("plda", false)) b.models.plda = ReadPlda(dir / "plda.txt");
  return b;
}

FrontEndFlags WithModelFeatures(FrontEndFlags fe, const ModelBundle& b) {
  if (!fe.features_given) fe.features = b.features;
  return fe;
}

}  // namespace

FrontEndConfig FrontEndFlags::ToConfig() const {
  FrontEndConfig c;
  c.features = ParseFeatureKind(features);
  Require(vad_ratio > 0.0, ErrorCode::kInvalidArgument, "--vad-ratio must be positive");
  c.vad.ratio = vad_ratio;
  return c;
}

int CmdSynthesize(const SynthesizeFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireSeed(g, "synthesize");
  RequireOut(g);
  RequireExists(f.pools, "pool directory");
  if (!fs::is_directory(f.pools)) Fail(ErrorCode::kIoError, f.pools + " is not a directory");
  Require(f.count >= 1, ErrorCode::kInvalidArgument, "--count must be at least 1");
  Require(1 <= f.min_changes && f.min_changes <= f.max_changes && f.max_changes <= 5,
          ErrorCode::kInvalidArgument, "need 1 <= --min-changes <= --max-changes <= 5");

  std::vector<std::string> labels;
  if (f.labels.empty()) {
    for (const auto& e : fs::directory_iterator(f.pools)) {
      if (e.is_directory()) labels.push_back(e.path().filename().string());
    }
    std::sort(labels.begin(), labels.end());
    if (labels.size() > 2) labels.resize(2);
  } else {
    labels = io::Split(f.labels, ',');
  }
  if (labels.size() != 2) {
    Fail(ErrorCode::kEmptyPool, "need exactly two labelled pools below " + f.pools);
  }

  std::vector<LabeledPool> pools;
  for (const std::string& label : labels) {
    const fs::path dir = fs::path(f.pools) / label;
    if (!fs::is_directory(dir)) Fail(ErrorCode::kIoError, "pool not found: " + dir.string());
    std::vector<fs::path> wavs;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") wavs.push_back(e.path());
    }
    std::sort(wavs.begin(), wavs.end());
    LabeledPool pool;
    pool.label = label;
    for (const fs::path& p : wavs) pool.utterances.push_back(ReadWav(p, f.rate));
    if (pool.utterances.empty()) Fail(ErrorCode::kEmptyPool, "no .wav files in " + dir.string());
    pools.push_back(std::move(pool));
  }

  StitchOptions opts;
  opts.crossfade_sec = f.crossfade;
  opts.trim_endpoints = !f.no_trim;
  opts.endpoint.ratio = f.fe.vad_ratio;

  std::vector<StitchResult> results(static_cast<std::size_t>(f.count));
  ParallelFor(results.size(), g.jobs, [&](std::size_t i) {
    const std::string id = UttName(static_cast<int>(i) + 1);
    Rng rng(DeriveSeed(g.seed, id));
    const auto n = static_cast<int>(rng.Between(f.min_changes, f.max_changes));
    results[i] = StitchCodeSwitched(pools, n, DeriveSeed(g.seed, id + "/stitch"), id, opts);
  });

  const fs::path root(g.out);
  fs::create_directories(root / "wav");
  std::vector<ManifestEntry> entries;
  std::vector<Annotation> annots;
  for (const StitchResult& r : results) {
    WriteWav(r.audio, root / "wav" / (r.audio.id + ".wav"));
    entries.push_back({r.audio.id, "wav/" + r.audio.id + ".wav"});
    annots.push_back(r.annotation);
  }
  WriteAnnotations(annots, root / "annotations.tsv");
  WriteManifest(entries, root / "manifest.tsv");

  RunRecord rec("synthesize");
  rec.Option("seed", std::to_string(g.seed));
  rec.Option("labels", labels[0] + "," + labels[1]);
  rec.Option("count", std::to_string(f.count));
  rec.Option("min_changes", std::to_string(f.min_changes));
  rec.Option("max_changes", std::to_string(f.max_changes));
  rec.Option("crossfade", io::Exact(f.crossfade));
  rec.Option("trim", f.no_trim ? "false" : "true");
  rec.Option("rate", std::to_string(f.rate));
  rec.Option("vad_ratio", io::Exact(f.fe.vad_ratio));
  rec.Input("pools", f.pools);
  rec.Output("manifest", "manifest.tsv");
  rec.Output("annotations", "annotations.tsv");
  io::AtomicWrite(root / "run.json", rec.Json());
  out << "synthesized " << results.size() << " utterances into " << g.out << "\n";
  return kExitOk;
}

int CmdMask(const MaskFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireOut(g);
  RequireExists(f.manifest, "manifest");
  RequireExists(f.annotations, "annotations");
  Require(f.x >= 1, ErrorCode::kInvalidArgument, "--x must be at least 1");
  const auto entries = ReadManifest(f.manifest);
  const auto annots = AnnotationsById(f.annotations);
  VadConfig vad;
  vad.ratio = f.fe.vad_ratio;

  struct Row {
    std::optional<MaskedStimulus> stim;
    std::string status = "ok";
  };
  std::vector<Row> rows(entries.size());
  ParallelFor(entries.size(), g.jobs, [&](std::size_t i) {
    const AudioBuffer buf = LoadAudio(entries[i], f.rate);
    const auto changes = FindAnnotation(annots, entries[i].utt_id).change_points();
    if (changes.empty()) {
      rows[i].status = "no-change";
      return;
    }
    const auto cs = static_cast<std::size_t>(std::lround(changes.front() * buf.sample_rate));
    try {
      rows[i].stim = GenerateMaskedStimulus(buf, cs, f.x, vad);
      rows[i].stim->audio.id = entries[i].utt_id;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientVoicedFrames) throw;
      rows[i].status = "insufficient-voiced-frames";
    }
  });

  const fs::path root(g.out);
  fs::create_directories(root / "wav");
  std::vector<ManifestEntry> masked;
  std::string table = "utt_id\tstatus\tchange_sample\ttrim_begin\tcenter\tsigma_left\tsigma_right\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string& id = entries[i].utt_id;
    if (!rows[i].stim) {
      table += id + '\t' + rows[i].status + "\t-\t-\t-\t-\t-\n";
      continue;
    }
    const MaskedStimulus& s = *rows[i].stim;
    WriteWav(s.audio, root / "wav" / (id + ".wav"));
    masked.push_back({id, "wav/" + id + ".wav"});
    table += id + "\tok\t" + std::to_string(s.change_sample) + '\t' +
             std::to_string(s.trim_begin) + '\t' + std::to_string(s.shape.center) + '\t' +
             io::Fixed(s.shape.sigma_left, 3) + '\t' + io::Fixed(s.shape.sigma_right, 3) + '\n';
  }
  io::AtomicWrite(root / "masks.tsv", table);
  WriteManifest(masked, root / "manifest.tsv");

  RunRecord rec("mask");
  rec.Option("x", std::to_string(f.x));
  rec.Option("vad_ratio", io::Exact(f.fe.vad_ratio));
  rec.Option("rate", std::to_string(f.rate));
  rec.InputHash("manifest", HashManifest(f.manifest));
  rec.Input("annotations", f.annotations);
  io::AtomicWrite(root / "run.json", rec.Json());
  out << "masked " << masked.size() << " of " << entries.size() << " utterances\n";
  return kExitOk;
}

int CmdFeaturize(const FeaturizeFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireOut(g);
  RequireExists(f.manifest, "manifest");
  const auto entries = ReadManifest(f.manifest);
  const FrontEndConfig cfg = f.fe.ToConfig();
  std::vector<FeatureMatrix> feats(entries.size());
  ParallelFor(entries.size(), g.jobs, [&](std::size_t i) {
    const AudioBuffer buf = LoadAudio(entries[i], f.rate);
    FeatureMatrix fm = ExtractFeatures(buf, cfg.features);
    VadConfig vad = cfg.vad;
    vad.frame_len_sec = fm.frame_len_sec;
    vad.hop_sec = fm.hop_sec;
    fm.voiced_mask = EnergyVad(buf, vad).voiced_mask;
    feats[i] = std::move(fm);
  });
  const fs::path root(g.out);
  fs::create_directories(root);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    WriteFeatureDump(feats[i], root / (entries[i].utt_id + ".ftr"));
  }
  RunRecord rec("featurize");
  RecordFrontEnd(rec, f.fe);
  rec.Option("rate", std::to_string(f.rate));
  rec.InputHash("manifest", HashManifest(f.manifest));
  io::AtomicWrite(root / "run.json", rec.Json());
  out << "wrote features for " << entries.size() << " utterances\n";
  return kExitOk;
}

int CmdVad(const FeaturizeFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireOut(g);
  RequireExists(f.manifest, "manifest");
  const auto entries = ReadManifest(f.manifest);
  VadConfig vad;
  vad.ratio = f.fe.vad_ratio;
  std::vector<VadResult> res(entries.size());
  ParallelFor(entries.size(), g.jobs, [&](std::size_t i) {
    res[i] = EnergyVad(LoadAudio(entries[i], f.rate), vad);
  });
  const fs::path root(g.out);
  fs::create_directories(root);
  std::size_t voiced = 0, total = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    WriteVadDump(res[i], root / (entries[i].utt_id + ".vad.tsv"));
    voiced += res[i].num_voiced();
    total += res[i].voiced_mask.size();
  }
  RunRecord rec("vad");
  rec.Option("vad_ratio", io::Exact(f.fe.vad_ratio));
  rec.Option("rate", std::to_string(f.rate));
  rec.InputHash("manifest", HashManifest(f.manifest));
  io::AtomicWrite(root / "run.json", rec.Json());
  out << voiced << " of " << total << " frames voiced\n";
  return kExitOk;
}

int CmdTrain(const TrainFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireSeed(g, "train");
  RequireOut(g);
  RequireExists(f.manifest, "manifest");
  RequireExists(f.annotations, "annotations");
  Require(f.components >= 1 && f.iters >= 0 && f.window >= 2, ErrorCode::kInvalidArgument,
          "need --components >= 1, --iters >= 0, --window >= 2");
  const ExtractorKind extractor = ParseExtractorKind(f.extractor);
  if (extractor == ExtractorKind::kImported) {
    Fail(ErrorCode::kInvalidArgument, "imported embeddings are not trained here");
  }

  const auto streams = LoadLabeledStreams(f.manifest, f.annotations, f.fe, f.rate, g.jobs);
  std::map<std::string, std::vector<const LabeledStream*>> by_label;
  std::vector<const LabeledStream*> all;
  for (const LabeledStream& s : streams) {
    by_label[s.label].push_back(&s);
    all.push_back(&s);
  }
  if (by_label.size() < 2) Fail(ErrorCode::kInsufficientClasses, "need at least two labels");

  std::string log = "stage\titer\tlog_likelihood\n";
  GmmTrainOptions go;
  go.num_components = static_cast<std::size_t>(f.components);
  go.num_iters = f.iters;
  go.seed = DeriveSeed(g.seed, "ubm");
  const FeatureMatrix pooled = Concatenate(all);
  GmmTrainResult ubm = TrainGmm(pooled.view(), go);
  for (std::size_t i = 0; i < ubm.log_likelihood_trace.size(); ++i) {
    log += "ubm\t" + std::to_string(i) + '\t' + io::Exact(ubm.log_likelihood_trace[i]) + '\n';
  }

  DetectorModels models;
  models.extractor = extractor;
  models.ubm = ubm.model;
  std::vector<NamedGmm> gmms{{"", ubm.model}};
  for (const auto& [label, ss] : by_label) {
    const FeatureMatrix rows = Concatenate(ss);
    DiagGmm adapted = MapAdapt(ubm.model, rows.view(), f.relevance);
    models.class_models.push_back(adapted);
    gmms.push_back({label, std::move(adapted)});
  }

  const fs::path root(g.out);
  std::optional<Eigen::MatrixXd> lda, wccn;
  std::optional<PldaModel> plda;
  if (f.lda_dim > 0 || f.wccn || f.length_norm || f.plda) {
    EmbeddingSet set = WindowEmbeddings(streams, models, static_cast<std::size_t>(f.window));
    Backend stage;
    if (f.lda_dim > 0) {
      lda = TrainLda(set, f.lda_dim);
      stage.lda = lda;
      set = stage.Apply(set);
      stage.lda.reset();
    }
    if (f.wccn) {
      if (f.lda_dim <= 0) {
        out << "note: a/u-vectors lie on a simplex; WCCN usually needs --lda-dim first\n";
      }
      wccn = TrainWccn(set);
      stage.wccn = wccn;
      set = stage.Apply(set);
      stage.wccn.reset();
    }
    if (f.length_norm) {
      stage.length_normalize = true;
      set = stage.Apply(set);
    }
    if (f.plda) {
      PldaTrainResult pr = TrainPlda(set, f.plda_iters);
      for (std::size_t i = 0; i < pr.log_likelihood_trace.size(); ++i) {
        log += "plda\t" + std::to_string(i) + '\t' + io::Exact(pr.log_likelihood_trace[i]) + '\n';
      }
      plda = std::move(pr.model);
    }
  }

  fs::create_directories(root);
  WriteGmms(gmms, root / "models.gmm");
  if (lda) WriteMatrix("LDA1", *lda, root / "lda.mat");
  if (wccn) WriteMatrix("WCCN1", *wccn, root / "wccn.mat");
  if (plda) WritePlda(*plda, root / "plda.txt");
  nlohmann::ordered_json desc;
  desc["extractor"] = std::string(ExtractorKindName(extractor));
  desc["features"] = f.fe.features;
  desc["window"] = f.window;
  desc["lda"] = lda.has_value();
  desc["wccn"] = wccn.has_value();
  desc["length_normalize"] = f.length_norm;
  desc["plda"] = plda.has_value();
  io::AtomicWrite(root / "backend.json", desc.dump(2) + "\n");
  io::AtomicWrite(root / "train_log.tsv", log);

  RunRecord rec("train");
  rec.Option("seed", std::to_string(g.seed));
  RecordFrontEnd(rec, f.fe);
  rec.Option("components", std::to_string(f.components));
  rec.Option("iters", std::to_string(f.iters));
  rec.Option("relevance", io::Exact(f.relevance));
  rec.Option("extractor", f.extractor);
  rec.Option("window", std::to_string(f.window));
  rec.Option("lda_dim", std::to_string(f.lda_dim));
  rec.Option("wccn", f.wccn ? "true" : "false");
  rec.Option("length_norm", f.length_norm ? "true" : "false");
  rec.Option("plda", f.plda ? "true" : "false");
  rec.Option("plda_iters", std::to_string(f.plda_iters));
  rec.Option("rate", std::to_string(f.rate));
  rec.InputHash("manifest", HashManifest(f.manifest));
  rec.Input("annotations", f.annotations);
  io::AtomicWrite(root / "run.json", rec.Json());

  const auto& tr = ubm.log_likelihood_trace;
  out << "UBM M=" << f.components << " log-likelihood " << io::Fixed(tr.front(), 4) << " -> "
      << io::Fixed(tr.back(), 4) << "; " << by_label.size() << " class models\n";
  return kExitOk;
}

int CmdDetect(const DetectFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireOut(g);
  RequireExists(f.manifest, "manifest");
  const DetectMode mode = ParseDetectMode(f.mode);
  DetectorConfig cfg =
      mode == DetectMode::kGaussianKl ? DetectorConfig::Unsupervised() : DetectorConfig::ModelBased();
  cfg.mode = mode;
  if (f.N > 0) cfg.N = f.N;
  if (f.alpha > 0.0) cfg.alpha = f.alpha;
  if (f.gamma > 0.0) cfg.gamma = f.gamma;
  if (f.delta > 0.0) cfg.delta = f.delta;
  cfg.Validate();

  std::optional<ModelBundle> bundle;
  FrontEndFlags fe = f.fe;
  if (!f.models.empty()) {
    RequireExists(f.models, "model directory");
    bundle = LoadModelDir(f.models);
    fe = WithModelFeatures(fe, *bundle);
  }
  if (!f.embeddings.empty()) {
    RequireExists(f.embeddings, "embedding directory");
    if (!bundle) bundle.emplace();
    bundle->models.extractor = ExtractorKind::kImported;
  }
  if (mode != DetectMode::kGaussianKl && !bundle) {
    Fail(ErrorCode::kMissingModels, f.mode + " needs --models or --embeddings");
  }
  const FrontEndConfig fec = fe.ToConfig();

  const auto entries = ReadManifest(f.manifest);
  std::vector<ChangePointSet> found(entries.size());
  ParallelFor(entries.size(), g.jobs, [&](std::size_t i) {
    const AudioBuffer buf = LoadAudio(entries[i], f.rate);
    const FeatureMatrix voiced = VoicedFeatures(buf, fec);
    if (mode == DetectMode::kGaussianKl) {
      found[i] = DetectInFeatures(voiced, cfg).changes;
      return;
    }
    DetectorModels models = bundle->models;
    EmbeddingTrack track;
    if (models.extractor == ExtractorKind::kImported) {
      track = ImportEmbeddings(fs::path(f.embeddings) / (entries[i].utt_id + ".emb"),
                               static_cast<std::size_t>(f.embedding_dim));
      models.track = &track;
    }
    found[i] = DetectInFeatures(voiced, cfg, &models).changes;
  });

  const fs::path root(g.out);
  fs::create_directories(root / "detections");
  std::string all;
  std::size_t total = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string rows = FormatDetections(entries[i].utt_id, found[i]);
    io::AtomicWrite(root / "detections" / (entries[i].utt_id + ".tsv"), rows);
    all += rows;
    total += found[i].size();
  }
  io::AtomicWrite(root / "detections.tsv", all);

  RunRecord rec("detect");
  rec.Option("mode", std::string(DetectModeName(cfg.mode)));
  rec.Option("N", std::to_string(cfg.N));
  rec.Option("alpha", io::Exact(cfg.alpha));
  rec.Option("gamma", io::Exact(cfg.gamma));
  rec.Option("delta", io::Exact(cfg.delta));
  rec.Option("smoothing_length", std::to_string(cfg.smoothing_length()));
  rec.Option("min_distance", std::to_string(cfg.min_distance()));
  RecordFrontEnd(rec, fe);
  rec.Option("rate", std::to_string(f.rate));
  if (bundle) rec.Option("extractor", std::string(ExtractorKindName(bundle->models.extractor)));
  rec.InputHash("manifest", HashManifest(f.manifest));
  if (!f.models.empty()) rec.Input("models", f.models);
  if (!f.embeddings.empty()) rec.Input("embeddings", f.embeddings);
  rec.Output("detections", "detections.tsv");
  io::AtomicWrite(root / "run.json", rec.Json());
  out << total << " change points in " << entries.size() << " utterances (config "
      << rec.ConfigHash() << ")\n";
  return kExitOk;
}

int CmdEvaluate(const EvaluateFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireOut(g);
  RequireExists(f.annotations, "annotations");
  RequireExists(f.detections, "detections");
  EvalConfig cfg;
  cfg.collar_sec = f.collar;
  cfg.Validate();

  const auto annots = ReadAnnotations(f.annotations);
  std::map<std::string, std::vector<double>> hyps;
  for (const DetectionRecord& d : ReadDetections(f.detections)) hyps[d.utt_id].push_back(d.time_sec);
  std::set<std::string> known;
  std::vector<UttDetections> utts;
  for (const Annotation& a : annots) {
    known.insert(a.utt_id);
    const auto refs = a.change_points();
    const auto it = hyps.find(a.utt_id);
    const std::vector<double> none;
    utts.push_back({a.utt_id, ChangePointSet::FromTimes(refs),
                    ChangePointSet::FromTimes(it == hyps.end() ? none : it->second)});
  }
  for (const auto& [id, _] : hyps) {
    if (!known.count(id)) Fail(ErrorCode::kFormatError, "detections for unknown utterance " + id);
  }
  const EvalReport report = ScoreCorpus(utts, cfg);

  RunRecord rec("evaluate");
  rec.Option("collar_sec", io::Exact(cfg.collar_sec));
  rec.Input("annotations", f.annotations);
  rec.Input("detections", f.detections);
  const fs::path root(g.out);
  fs::create_directories(root);
  const std::string text = FormatReportText(report, rec.Fields());
  io::AtomicWrite(root / "report.txt", text);
  io::AtomicWrite(root / "report.csv", FormatReportCsv(report, rec.Fields()));
  rec.Output("report", "report.txt");
  io::AtomicWrite(root / "run.json", rec.Json());
  out << FormatReportText(report);
  return kExitOk;
}

int CmdDiscriminate(const DiscriminateFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireSeed(g, "discriminate");
  RequireOut(g);
  RequireExists(f.manifest, "manifest");
  RequireExists(f.annotations, "annotations");
  std::vector<std::size_t> xs = f.x;
  if (xs.empty()) xs.assign(std::begin(kStudyWindowSizes), std::end(kStudyWindowSizes));

  const auto entries = ReadManifest(f.manifest);
  const auto annots = AnnotationsById(f.annotations);
  const FrontEndConfig cfg = f.fe.ToConfig();
  std::vector<std::optional<StudyUtterance>> per(entries.size());
  ParallelFor(entries.size(), g.jobs, [&](std::size_t i) {
    const auto changes = FindAnnotation(annots, entries[i].utt_id).change_points();
    if (changes.size() != 1) return;
    StudyUtterance u;
    u.utt_id = entries[i].utt_id;
    u.voiced = VoicedFeatures(LoadAudio(entries[i], f.rate), cfg);
    u.change_row = VoicedRowAt(u.voiced, changes.front());
    per[i] = std::move(u);
  });
  std::vector<StudyUtterance> utts;
  for (auto& u : per) {
    if (u) utts.push_back(std::move(*u));
  }
  if (utts.empty()) Fail(ErrorCode::kEmptyInput, "no single-change utterances");

  const auto results = DiscriminationSweep(utts, xs, g.seed);
  const fs::path root(g.out);
  fs::create_directories(root);
  const std::string csv = FormatDiscriminationCsv(results);
  io::AtomicWrite(root / "discriminate.csv", csv);

  RunRecord rec("discriminate");
  rec.Option("seed", std::to_string(g.seed));
  RecordFrontEnd(rec, f.fe);
  std::string xl;
  for (std::size_t x : xs) xl += (xl.empty() ? "" : ",") + std::to_string(x);
  rec.Option("x", xl);
  rec.Option("rate", std::to_string(f.rate));
  rec.InputHash("manifest", HashManifest(f.manifest));
  rec.Input("annotations", f.annotations);
  rec.Output("single_change_utterances", std::to_string(utts.size()));
  rec.Output("table", "discriminate.csv");
  io::AtomicWrite(root / "run.json", rec.Json());
  out << csv;
  return kExitOk;
}

int CmdTrials(const TrialsFlags& f, const GlobalFlags& g, std::ostream& out) {
  RequireSeed(g, "trials");
  RequireOut(g);
  RequireExists(f.manifest, "manifest");
  RequireExists(f.annotations, "annotations");
  RequireExists(f.models, "model directory");
  const ModelBundle bundle = LoadModelDir(f.models);
  const bool use_plda = f.scorer == "plda";
  if (!use_plda && f.scorer != "cosine") {
    Fail(ErrorCode::kInvalidArgument, "--scorer must be cosine or plda");
  }
  if (use_plda && !bundle.models.plda) {
    Fail(ErrorCode::kMissingModels, "model directory has no PLDA model");
  }
  const FrontEndFlags fe = WithModelFeatures(f.fe, bundle);
  const auto streams = LoadLabeledStreams(f.manifest, f.annotations, fe, f.rate, g.jobs);
  const EmbeddingSet raw = WindowEmbeddings(streams, bundle.models, static_cast<std::size_t>(f.window));
  const EmbeddingSet set = bundle.models.backend.Apply(raw);
  const auto trials = BuildWlBlTrials(set, f.n_each, DeriveSeed(g.seed, "trials"));

  std::optional<PldaScorer> plda;
  if (use_plda) plda.emplace(*bundle.models.plda);
  std::vector<ScoredTrial> scored;
  std::string table = "a\tb\ttarget\tscore\n";
  for (const Trial& t : trials) {
    const Eigen::VectorXd u = set.vectors.row(static_cast<Eigen::Index>(t.a)).transpose();
    const Eigen::VectorXd v = set.vectors.row(static_cast<Eigen::Index>(t.b)).transpose();
    const double s = plda ? plda->Score(u, v) : 1.0 - CosineDistance(u, v);
    scored.push_back({s, t.same_class});
    table += std::to_string(t.a) + '\t' + std::to_string(t.b) + '\t' +
             (t.same_class ? "1" : "0") + '\t' + io::Exact(s) + '\n';
  }
  const double eer = Eer(scored);

  const fs::path root(g.out);
  fs::create_directories(root);
  io::AtomicWrite(root / "trials.tsv", table);
  io::AtomicWrite(root / "eer.txt", "eer_percent\t" + io::Fixed(eer, 4) + "\nvectors\t" +
                                        std::to_string(set.size()) + "\n");
  RunRecord rec("trials");
  rec.Option("seed", std::to_string(g.seed));
  RecordFrontEnd(rec, fe);
  rec.Option("window", std::to_string(f.window));
  rec.Option("n_each", std::to_string(f.n_each));
  rec.Option("scorer", f.scorer);
  rec.Option("rate", std::to_string(f.rate));
  rec.InputHash("manifest", HashManifest(f.manifest));
  rec.Input("annotations", f.annotations);
  rec.Input("models", f.models);
  io::AtomicWrite(root / "run.json", rec.Json());
  out << "EER " << io::Fixed(eer, 2) << "% over " << trials.size() << " trials\n";
  return kExitOk;
}

}  // namespace lcd::cli
