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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcd/audio.hpp"
#include "lcd/backend.hpp"
#include "lcd/features.hpp"
#include "lcd/gaussian.hpp"
#include "lcd/vad.hpp"

namespace lcd {

enum class DetectMode { kGaussianKl, kEmbeddingCosine, kEmbeddingPlda };

std::string_view DetectModeName(DetectMode mode);
DetectMode ParseDetectMode(std::string_view name);

struct DetectorConfig {
  int N = 150;          // analysis window length, voiced frames
  double alpha = 1.0;   // threshold scale
  double gamma = 0.9;   // minimum peak distance as a multiple of N
  double delta = 1.3;   // smoothing length divisor
  DetectMode mode = DetectMode::kGaussianKl;

  // Smoothing window length round(N / delta), at least 1.
  int smoothing_length() const;
  // Minimum distance between accepted peaks, round(gamma * N), at least 1.
  int min_distance() const;
  void Validate() const;

  static DetectorConfig Unsupervised();
  static DetectorConfig ModelBased();
};

// D(p) for contour position p, which compares voiced rows [i - N, i) and
// [i, i + N) with i = p + N.
struct DistanceContour {
  std::vector<double> values;
  std::size_t window = 0;
  bool smoothed = false;

  std::size_t size() const { return values.size(); }
  std::size_t voiced_index(std::size_t p) const { return p + window; }
};

struct ChangePoint {
  std::size_t voiced_idx = 0;
  std::size_t frame_idx = 0;
  double time_sec = 0.0;
  double score = 0.0;
};

struct ChangePointSet {
  std::vector<ChangePoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  std::vector<double> times() const;

  // Reference set from bare change instants (indices left at zero).
  static ChangePointSet FromTimes(std::span<const double> times);
};

DistanceContour GaussianDistanceContour(const FeatureMatrix& voiced, int N);

enum class ExtractorKind { kUVector, kAVector, kImported };

std::string_view ExtractorKindName(ExtractorKind kind);
ExtractorKind ParseExtractorKind(std::string_view name);

// Everything the embedding modes need. Only the members relevant to the
// chosen extractor and scorer have to be filled in.
struct DetectorModels {
  ExtractorKind extractor = ExtractorKind::kAVector;
  std::optional<DiagGmm> ubm;            // u-vectors
  std::vector<DiagGmm> class_models;     // a-vectors
  const EmbeddingTrack* track = nullptr; // imported embeddings
  Backend backend;
  std::optional<PldaModel> plda;
};

enum class EmbeddingScorer { kCosine, kNegativePlda };

// psi(F(left window), F(right window)) per position; a distance, so the PLDA
// scorer contributes the negated log-likelihood ratio.
DistanceContour EmbeddingDistanceContour(const FeatureMatrix& voiced,
                                         const DetectorModels& models,
                                         EmbeddingScorer scorer, int N);

// Statistic vector (before the backend) of a block of voiced rows under the
// u-vector or a-vector extractor.
Eigen::VectorXd StatEmbedding(FrameView rows, const DetectorModels& models);

// Voiced rows of one label, contiguous in the source audio.
struct LabeledStream {
  std::string label;
  FeatureMatrix voiced;
};

// Non-overlapping windows of `window` rows cut from every stream (a trailing
// partial window is dropped), one raw statistic vector per window.
EmbeddingSet WindowEmbeddings(std::span<const LabeledStream> streams,
                              const DetectorModels& models, std::size_t window);

// Normalised Hamming-weighted moving average with edge replication. Even
// lengths are rounded up to the next odd length so the window is centred.
DistanceContour SmoothContour(const DistanceContour& c, int h_l);

// alpha times the mean of the previous N values (fewer during warm-up);
// the first position uses alpha * D(0).
std::vector<double> ThresholdContour(const DistanceContour& c, double alpha, int N);

// Peaks as contour positions with their heights. Positions are contour
// indices; DetectInFeatures maps them back to voiced rows and seconds.
struct Peak {
  std::size_t position = 0;
  double height = 0.0;
};
std::vector<Peak> PickPeaks(std::span<const double> contour, std::span<const double> threshold,
                            int min_dist);

struct Detection {
  ChangePointSet changes;
  DistanceContour contour;    // smoothed
  std::vector<double> threshold;
};

// Contour, smoothing, threshold and peak picking on an already voiced-only
// feature matrix.
Detection DetectInFeatures(const FeatureMatrix& voiced, const DetectorConfig& cfg,
                           const DetectorModels* models = nullptr);

struct FrontEndConfig {
  FeatureKind features = FeatureKind::kMfcc13;
  VadConfig vad;
};

// Feature extraction and VAD from audio; returns the voiced-only matrix.
FeatureMatrix VoicedFeatures(const AudioBuffer& buf, const FrontEndConfig& fe);

ChangePointSet DetectChanges(const AudioBuffer& buf, const DetectorConfig& cfg,
                             const DetectorModels* models = nullptr,
                             const FrontEndConfig& fe = {});

// "utt_id<TAB>time_sec<TAB>score" rows with six decimals, sorted by time.
std::string FormatDetections(std::string_view utt_id, const ChangePointSet& cps);

struct DetectionRecord {
  std::string utt_id;
  double time_sec = 0.0;
  double score = 0.0;
};
std::vector<DetectionRecord> ReadDetections(const std::filesystem::path& path);

}  // namespace lcd
