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

#include "lcd/detect.hpp"
#include "lcd/error.hpp"
#include "lcd/io_util.hpp"

namespace lcd {

std::string_view DetectModeName(DetectMode mode) {
  switch (mode) {
    case DetectMode::kGaussianKl: return "gaussian-kl";
    case DetectMode::kEmbeddingCosine: return "embedding-cosine";
    case DetectMode::kEmbeddingPlda: return "embedding-plda";
  }
  return "gaussian-kl";
}

DetectMode ParseDetectMode(std::string_view name) {
  if (name == "gaussian-kl") return DetectMode::kGaussianKl;
  if (name == "embedding-cosine") return DetectMode::kEmbeddingCosine;
  if (name == "embedding-plda") return DetectMode::kEmbeddingPlda;
  Fail(ErrorCode::kInvalidArgument, "unknown detection mode '" + std::string(name) + "'");
}

std::string_view ExtractorKindName(ExtractorKind kind) {
  switch (kind) {
    case ExtractorKind::kUVector: return "u-vector";
    case ExtractorKind::kAVector: return "a-vector";
    case ExtractorKind::kImported: return "imported";
  }
  return "a-vector";
}

ExtractorKind ParseExtractorKind(std::string_view name) {
  if (name == "u-vector") return ExtractorKind::kUVector;
  if (name == "a-vector") return ExtractorKind::kAVector;
  if (name == "imported") return ExtractorKind::kImported;
  Fail(ErrorCode::kInvalidArgument, "unknown extractor '" + std::string(name) + "'");
}

int DetectorConfig::smoothing_length() const {
  return std::max(1, static_cast<int>(std::lround(N / delta)));
}

int DetectorConfig::min_distance() const {
  return std::max(1, static_cast<int>(std::lround(gamma * N)));
}

void DetectorConfig::Validate() const {
  Require(N >= 10, ErrorCode::kInvalidArgument, "N must be at least 10");
  Require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::kInvalidArgument, "alpha must be > 0");
  Require(gamma > 0.0 && std::isfinite(gamma), ErrorCode::kInvalidArgument, "gamma must be > 0");
  Require(delta > 0.0 && std::isfinite(delta), ErrorCode::kInvalidArgument, "delta must be > 0");
}

DetectorConfig DetectorConfig::Unsupervised() { return {}; }

DetectorConfig DetectorConfig::ModelBased() {
  DetectorConfig c;
  c.N = 200;
  c.alpha = 3.2;
  c.gamma = 0.9;
  c.delta = 1.3;
  c.mode = DetectMode::kEmbeddingCosine;
  return c;
}

std::vector<double> ChangePointSet::times() const {
  std::vector<double> t;
  t.reserve(points.size());
  for (const ChangePoint& p : points) t.push_back(p.time_sec);
  return t;
}

ChangePointSet ChangePointSet::FromTimes(std::span<const double> times) {
  ChangePointSet s;
  for (double t : times) s.points.push_back({0, 0, t, 0.0});
  std::sort(s.points.begin(), s.points.end(),
            [](const ChangePoint& a, const ChangePoint& b) { return a.time_sec < b.time_sec; });
  return s;
}

Detection DetectInFeatures(const FeatureMatrix& voiced, const DetectorConfig& cfg,
                           const DetectorModels* models) {
  cfg.Validate();
  DistanceContour raw;
  if (cfg.mode == DetectMode::kGaussianKl) {
    raw = GaussianDistanceContour(voiced, cfg.N);
  } else {
    if (models == nullptr) {
      Fail(ErrorCode::kMissingModels,
           std::string(DetectModeName(cfg.mode)) + " detection needs trained models");
    }
    const EmbeddingScorer scorer = cfg.mode == DetectMode::kEmbeddingPlda
                                       ? EmbeddingScorer::kNegativePlda
                                       : EmbeddingScorer::kCosine;
    raw = EmbeddingDistanceContour(voiced, *models, scorer, cfg.N);
  }

  Detection det;
  det.contour = SmoothContour(raw, cfg.smoothing_length());
  det.threshold = ThresholdContour(det.contour, cfg.alpha, cfg.N);
  for (const Peak& pk : PickPeaks(det.contour.values, det.threshold, cfg.min_distance())) {
    ChangePoint cp;
    cp.voiced_idx = det.contour.voiced_index(pk.position);
    cp.frame_idx = voiced.source_frame(cp.voiced_idx);
    cp.time_sec = voiced.frame_center_sec(cp.voiced_idx);
    cp.score = pk.height;
    det.changes.points.push_back(cp);
  }
  return det;
}

FeatureMatrix VoicedFeatures(const AudioBuffer& buf, const FrontEndConfig& fe) {
  const FeatureMatrix all = ExtractFeatures(buf, fe.features);
  VadConfig vad_cfg = fe.vad;
  vad_cfg.frame_len_sec = all.frame_len_sec;
  vad_cfg.hop_sec = all.hop_sec;
  const VadResult vad = EnergyVad(buf, vad_cfg);
  return SelectVoiced(all, vad);
}

ChangePointSet DetectChanges(const AudioBuffer& buf, const DetectorConfig& cfg,
                             const DetectorModels* models, const FrontEndConfig& fe) {
  cfg.Validate();
  return DetectInFeatures(VoicedFeatures(buf, fe), cfg, models).changes;
}

std::string FormatDetections(std::string_view utt_id, const ChangePointSet& cps) {
  std::string out;
  for (const ChangePoint& p : cps.points) {
    out += utt_id;
    out += '\t' + io::Fixed(p.time_sec, 6) + '\t' + io::Fixed(p.score, 6) + '\n';
  }
  return out;
}

std::vector<DetectionRecord> ReadDetections(const std::filesystem::path& path) {
  std::vector<DetectionRecord> out;
  for (const std::string& line : io::ReadLines(path)) {
    const auto f = io::Split(line, '\t');
    if (f.size() != 3) {
      Fail(ErrorCode::kFormatError, path.string() + ": detection rows need three fields");
    }
    out.push_back({f[0], io::ParseDouble(f[1]), io::ParseDouble(f[2])});
  }
  return out;
}

}  // namespace lcd
