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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>

#include "lcd/corpus.hpp"
#include "lcd/detect.hpp"
#include "lcd/io_util.hpp"
#include "lcd/rng.hpp"
#include "support/expect.hpp"
#include "support/synth.hpp"

namespace lcd {
namespace {

using testing::CodeOf;

std::size_t ArgMax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

DistanceContour Contour(std::vector<double> values, std::size_t window = 10) {
  DistanceContour c;
  c.values = std::move(values);
  c.window = window;
  return c;
}

TEST(DetectorConfig, Defaults) {
  const DetectorConfig u = DetectorConfig::Unsupervised();
  EXPECT_EQ(u.N, 150);
  EXPECT_EQ(u.alpha, 1.0);
  EXPECT_EQ(u.gamma, 0.9);
  EXPECT_EQ(u.mode, DetectMode::kGaussianKl);
  EXPECT_EQ(u.smoothing_length(), 115);
  EXPECT_EQ(u.min_distance(), 135);
  const DetectorConfig m = DetectorConfig::ModelBased();
  EXPECT_EQ(m.N, 200);
  EXPECT_EQ(m.alpha, 3.2);
  EXPECT_EQ(m.delta, 1.3);
  EXPECT_EQ(m.min_distance(), 180);
}

TEST(DetectorConfig, Validation) {
  DetectorConfig c;
  c.N = 9;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.alpha = 0.0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.delta = -1.0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  for (DetectMode m : {DetectMode::kGaussianKl, DetectMode::kEmbeddingCosine, DetectMode::kEmbeddingPlda}) {
    EXPECT_EQ(ParseDetectMode(DetectModeName(m)), m);
  }
}

TEST(GaussianContour, LengthAndTooShort) {
  const auto gs = testing::MakeGaussianStream({120}, 3, 0.0, 1);
  EXPECT_EQ(GaussianDistanceContour(gs.features, 20).size(), 120u - 40u + 1u);
  EXPECT_EQ(GaussianDistanceContour(gs.features, 60).size(), 1u);
  EXPECT_EQ(CodeOf([&] { GaussianDistanceContour(gs.features, 61); }), ErrorCode::kTooShort);
}

TEST(GaussianContour, StationaryStreamHasFlatMeanContour) {
  // Averaged over seeded realisations, the contour of an i.i.d. stream does
  // not depend on position.
  const int N = 50, T = 400, runs = 200;
  std::vector<double> mean(T - 2 * N + 1, 0.0);
  for (int r = 0; r < runs; ++r) {
    const auto gs = testing::MakeGaussianStream({T}, 13, 0.0, 1000 + r);
    const DistanceContour c = GaussianDistanceContour(gs.features, N);
    for (std::size_t p = 0; p < c.size(); ++p) mean[p] += c.values[p] / runs;
  }
  const auto [lo, hi] = std::minmax_element(mean.begin(), mean.end());
  const double avg = std::accumulate(mean.begin(), mean.end(), 0.0) / mean.size();
  EXPECT_LT(*hi - *lo, 0.1 * avg);
}

TEST(GaussianContour, PeakAtTheSwitch) {
  const int N = 100;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto gs = testing::MakeGaussianStream({400, 400}, 13, 1.0, seed);
    const DistanceContour c = GaussianDistanceContour(gs.features, N);
    const double at = static_cast<double>(c.voiced_index(ArgMax(c.values)));
    EXPECT_NEAR(at, static_cast<double>(gs.change_rows[0]), 0.1 * N) << seed;
  }
}

class EmbeddingContourTest : public ::testing::Test {
 protected:
  static constexpr double kOffset = 1.0;
  void SetUp() override {
    FeatureMatrix both(8000, 13, FeatureKind::kGeneric);
    const FeatureMatrix a = testing::ClassRows(0, 4000, 13, kOffset, 1);
    const FeatureMatrix b = testing::ClassRows(1, 4000, 13, kOffset, 2);
    std::copy(a.data.begin(), a.data.end(), both.data.begin());
    std::copy(b.data.begin(), b.data.end(), both.data.begin() + a.data.size());
    GmmTrainOptions o;
    o.num_components = 8;
    o.seed = 3;
    ubm_ = TrainGmm(both.view(), o).model;
    models_.extractor = ExtractorKind::kAVector;
    models_.class_models = {MapAdapt(ubm_, a.view()), MapAdapt(ubm_, b.view())};
  }
  DiagGmm ubm_;
  DetectorModels models_;
};

TEST_F(EmbeddingContourTest, AVectorPeakAtTheSwitch) {
  const int N = 100;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto gs = testing::MakeGaussianStream({350, 350}, 13, kOffset, 50 + seed);
    const DistanceContour c = EmbeddingDistanceContour(gs.features, models_, EmbeddingScorer::kCosine, N);
    EXPECT_EQ(c.size(), 700u - 200u + 1u);
    const double at = static_cast<double>(c.voiced_index(ArgMax(c.values)));
    EXPECT_NEAR(at, static_cast<double>(gs.change_rows[0]), 0.15 * N) << seed;
  }
}

TEST_F(EmbeddingContourTest, SameClassBelowBetweenClassDistance) {
  const int N = 100;
  const auto same = testing::MakeGaussianStream({800}, 13, kOffset, 70);
  const DistanceContour c = EmbeddingDistanceContour(same.features, models_, EmbeddingScorer::kCosine, N);
  const double within = std::accumulate(c.values.begin(), c.values.end(), 0.0) / c.size();
  // Between-class trial distances from independent windows of each class.
  const FeatureMatrix a = testing::ClassRows(0, 2000, 13, kOffset, 71);
  const FeatureMatrix b = testing::ClassRows(1, 2000, 13, kOffset, 72);
  double between = 0.0;
  for (std::size_t k = 0; k < 20; ++k) {
    between += CosineDistance(StatEmbedding(a.view(k * N, (k + 1) * N), models_),
                              StatEmbedding(b.view(k * N, (k + 1) * N), models_)) / 20.0;
  }
  EXPECT_LT(within, between);
}

TEST_F(EmbeddingContourTest, SingleComponentUVectorIsZero) {
  DetectorModels m;
  m.extractor = ExtractorKind::kUVector;
  GmmTrainOptions o;
  o.num_components = 1;
  const auto gs = testing::MakeGaussianStream({100, 100}, 13, kOffset, 5);
  m.ubm = TrainGmm(gs.features.view(), o).model;
  const DistanceContour c = EmbeddingDistanceContour(gs.features, m, EmbeddingScorer::kCosine, 20);
  for (double v : c.values) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST_F(EmbeddingContourTest, MissingModels) {
  const auto gs = testing::MakeGaussianStream({100, 100}, 13, kOffset, 5);
  DetectorModels empty;
  EXPECT_EQ(CodeOf([&] { EmbeddingDistanceContour(gs.features, empty, EmbeddingScorer::kCosine, 20); }),
            ErrorCode::kMissingModels);
  EXPECT_EQ(CodeOf([&] { EmbeddingDistanceContour(gs.features, models_, EmbeddingScorer::kNegativePlda, 20); }),
            ErrorCode::kMissingModels);
  DetectorConfig cfg;
  cfg.N = 20;
  cfg.mode = DetectMode::kEmbeddingCosine;
  EXPECT_EQ(CodeOf([&] { DetectInFeatures(gs.features, cfg); }), ErrorCode::kMissingModels);
  const auto narrow = testing::MakeGaussianStream({100, 100}, 4, kOffset, 5);
  EXPECT_EQ(CodeOf([&] { EmbeddingDistanceContour(narrow.features, models_, EmbeddingScorer::kCosine, 20); }),
            ErrorCode::kExtractorMismatch);
}

TEST(Smoothing, LengthOneIsIdentity) {
  const DistanceContour c = Contour({3, 1, 4, 1, 5, 9, 2, 6});
  const DistanceContour s = SmoothContour(c, 1);
  EXPECT_EQ(s.values, c.values);
  EXPECT_TRUE(s.smoothed);
  EXPECT_EQ(s.window, c.window);
}

TEST(Smoothing, ConstantIsUnchanged) {
  const DistanceContour s = SmoothContour(Contour(std::vector<double>(50, 2.5)), 11);
  for (double v : s.values) EXPECT_NEAR(v, 2.5, 1e-14);
}

TEST(Smoothing, ImpulseGivesHammingShape) {
  std::vector<double> v(41, 0.0);
  v[20] = 1.0;
  const int h = 9;
  const DistanceContour s = SmoothContour(Contour(v), h);
  std::vector<double> w(h);
  double total = 0.0;
  for (int k = 0; k < h; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / (h - 1));
    total += w[k];
  }
  EXPECT_EQ(ArgMax(s.values), 20u);
  for (int k = 0; k < h; ++k) EXPECT_NEAR(s.values[20 - h / 2 + k], w[k] / total, 1e-15);
  EXPECT_EQ(s.values[20 - h / 2 - 1], 0.0);
  EXPECT_EQ(s.values[20 + h / 2 + 1], 0.0);
}

TEST(Smoothing, EvenLengthIsCentred) {
  std::vector<double> v(21, 0.0);
  v[10] = 1.0;
  const DistanceContour s = SmoothContour(Contour(v), 6);
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(s.values[10 - k], s.values[10 + k], 1e-15);
}

TEST(Smoothing, NeverRaisesTheMaximum) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(200);
    for (double& x : v) x = std::abs(rng.Normal());
    const int h = 1 + static_cast<int>(rng.Below(60));
    const DistanceContour s = SmoothContour(Contour(v), h);
    EXPECT_LE(*std::max_element(s.values.begin(), s.values.end()),
              *std::max_element(v.begin(), v.end()) + 1e-12);
  }
}

TEST(Threshold, ConstantContour) {
  const auto th = ThresholdContour(Contour(std::vector<double>(40, 2.0)), 1.5, 10);
  for (double t : th) EXPECT_DOUBLE_EQ(t, 3.0);
  for (double t : ThresholdContour(Contour(std::vector<double>(40, 2.0)), 0.0, 10)) EXPECT_EQ(t, 0.0);
}

TEST(Threshold, StepRamp) {
  const int N = 10, p = 20;
  const double alpha = 2.0;
  std::vector<double> v(60, 1.0);
  std::fill(v.begin() + p, v.end(), 5.0);
  const auto th = ThresholdContour(Contour(v), alpha, N);
  for (int q = N; q < 60; ++q) {
    const int k = std::clamp(q - p, 0, N);
    EXPECT_NEAR(th[q], alpha * ((N - k) * 1.0 + k * 5.0) / N, 1e-12) << q;
  }
  EXPECT_EQ(th[0], alpha * v[0]);
}

TEST(Threshold, WarmUpUsesAvailablePrefix) {
  const auto th = ThresholdContour(Contour({1, 3, 5, 7}), 1.0, 10);
  EXPECT_DOUBLE_EQ(th[0], 1.0);
  EXPECT_DOUBLE_EQ(th[1], 1.0);
  EXPECT_DOUBLE_EQ(th[2], 2.0);
  EXPECT_DOUBLE_EQ(th[3], 3.0);
}

std::vector<std::size_t> Positions(const std::vector<Peak>& peaks) {
  std::vector<std::size_t> out;
  for (const Peak& p : peaks) out.push_back(p.position);
  return out;
}

TEST(Peaks, MonotoneHasNone) {
  const std::vector<double> up{1, 2, 3, 4, 5}, zero(5, 0.0);
  EXPECT_TRUE(PickPeaks(up, zero, 1).empty());
}

TEST(Peaks, SmallExample) {
  const std::vector<double> c{0, 1, 0, 2, 0}, zero(5, 0.0);
  const auto peaks = PickPeaks(c, zero, 1);
  EXPECT_EQ(Positions(peaks), (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(peaks[1].height, 2.0);
}

TEST(Peaks, GreedyKeepsTheTaller) {
  std::vector<double> c(60, 0.0), zero(60, 0.0);
  c[20] = 3.0;
  c[30] = 4.0;
  EXPECT_EQ(Positions(PickPeaks(c, zero, 20)), (std::vector<std::size_t>{30}));
  EXPECT_EQ(Positions(PickPeaks(c, zero, 10)), (std::vector<std::size_t>{20, 30}));
}

TEST(Peaks, PlateauReportsLeftmost) {
  const std::vector<double> c{0, 2, 2, 2, 0, 1, 0}, zero(7, 0.0);
  EXPECT_EQ(Positions(PickPeaks(c, zero, 1)), (std::vector<std::size_t>{1, 5}));
}

TEST(Peaks, ThresholdAppliesAfterSpacing) {
  // The taller peak wins the spacing contest and then fails its threshold,
  // so the neighbour it suppressed is not brought back.
  std::vector<double> c(40, 0.0), th(40, 0.0);
  c[10] = 2.0;
  c[15] = 3.0;
  th[15] = 10.0;
  EXPECT_TRUE(PickPeaks(c, th, 10).empty());
  th[15] = 0.0;
  th[10] = 10.0;
  EXPECT_EQ(Positions(PickPeaks(c, th, 10)), (std::vector<std::size_t>{15}));
}

TEST(Detect, InvariantsOnRandomStreams) {
  DetectorConfig cfg;
  cfg.N = 50;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto gs = testing::RandomGaussianStream(1, 4, 60, 300, 5, 1.0 + seed % 3, seed);
    const Detection det = DetectInFeatures(gs.features, cfg);
    const std::size_t T = gs.features.num_frames;
    EXPECT_EQ(det.contour.size(), T - 2 * cfg.N + 1);
    EXPECT_EQ(det.threshold.size(), det.contour.size());
    const auto& pts = det.changes.points;
    const double end = gs.features.frame_center_sec(T - 1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_GE(pts[i].time_sec, 0.0);
      EXPECT_LE(pts[i].time_sec, end);
      if (i > 0) {
        EXPECT_GE(pts[i].voiced_idx - pts[i - 1].voiced_idx,
                  static_cast<std::size_t>(cfg.min_distance()));
        EXPECT_GT(pts[i].time_sec, pts[i - 1].time_sec);
      }
    }
  }
}

TEST(Detect, MapsVoicedRowsToSourceFrames) {
  auto gs = testing::MakeGaussianStream({300, 300}, 4, 3.0, 9);
  FeatureMatrix& fm = gs.features;
  // Pretend every second source frame was unvoiced.
  fm.voiced_index_map.resize(fm.num_frames);
  fm.voiced_mask.assign(2 * fm.num_frames, 0);
  for (std::size_t p = 0; p < fm.num_frames; ++p) {
    fm.voiced_index_map[p] = 2 * p;
    fm.voiced_mask[2 * p] = 1;
  }
  fm.frame_start_times.resize(2 * fm.num_frames);
  for (std::size_t f = 0; f < fm.frame_start_times.size(); ++f) fm.frame_start_times[f] = 0.01 * f;
  DetectorConfig cfg;
  cfg.N = 100;
  const Detection det = DetectInFeatures(fm, cfg);
  ASSERT_EQ(det.changes.size(), 1u);
  const ChangePoint& cp = det.changes.points[0];
  EXPECT_EQ(cp.frame_idx, 2 * cp.voiced_idx);
  EXPECT_DOUBLE_EQ(cp.time_sec, 0.01 * cp.frame_idx + 0.01);
  EXPECT_NEAR(static_cast<double>(cp.voiced_idx), 300.0, 10.0);
}

std::size_t FirstRowAtOrAfter(const FeatureMatrix& voiced, double t) {
  for (std::size_t p = 0; p < voiced.num_frames; ++p) {
    if (voiced.frame_center_sec(p) >= t) return p;
  }
  return voiced.num_frames;
}

class AudioDetectTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::vector<LabeledPool> pools{{"A", {testing::SynthClassAudio(0, 6.0, 21)}},
                                   {"B", {testing::SynthClassAudio(1, 6.0, 22)}}};
    stitched_ = StitchCodeSwitched(pools, 1, 5, "e2e");
  }
  StitchResult stitched_;
};

TEST_F(AudioDetectTest, FindsTheSingleChange) {
  const DetectorConfig cfg = DetectorConfig::Unsupervised();
  const FeatureMatrix voiced = VoicedFeatures(stitched_.audio, {});
  const Detection det = DetectInFeatures(voiced, cfg);
  ASSERT_EQ(det.changes.size(), 1u);
  const std::size_t truth = FirstRowAtOrAfter(voiced, stitched_.annotation.change_points()[0]);
  EXPECT_NEAR(static_cast<double>(det.changes.points[0].voiced_idx), static_cast<double>(truth), 50.0);
  EXPECT_EQ(DetectChanges(stitched_.audio, cfg).times(), det.changes.times());
}

TEST_F(AudioDetectTest, AmplitudeScalingKeepsDetections) {
  const DetectorConfig cfg = DetectorConfig::Unsupervised();
  const ChangePointSet base = DetectChanges(stitched_.audio, cfg);
  for (double c : {0.25, 0.5}) {
    AudioBuffer scaled = stitched_.audio;
    for (double& v : scaled.samples) v *= c;
    const ChangePointSet s = DetectChanges(scaled, cfg);
    ASSERT_EQ(s.size(), base.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s.points[i].voiced_idx, base.points[i].voiced_idx);
      EXPECT_EQ(s.points[i].frame_idx, base.points[i].frame_idx);
    }
  }
}

TEST(DetectionFile, RoundTrip) {
  ChangePointSet cps;
  cps.points.push_back({10, 12, 1.25, 0.5});
  cps.points.push_back({300, 320, 3.2, 1.0 / 3.0});
  const std::string text = FormatDetections("u7", cps);
  EXPECT_EQ(text, "u7\t1.250000\t0.500000\nu7\t3.200000\t0.333333\n");
  const auto p = std::filesystem::temp_directory_path() / "lcd_det.tsv";
  io::AtomicWrite(p, text);
  const auto back = ReadDetections(p);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].utt_id, "u7");
  EXPECT_DOUBLE_EQ(back[1].time_sec, 3.2);
  std::filesystem::remove(p);
}

}  // namespace
}  // namespace lcd
