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
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lcd/corpus.hpp"
#include "lcd/detect.hpp"
#include "lcd/features.hpp"

namespace lcd {

struct EvalConfig {
  double collar_sec = 1.0;  // half-width of the tolerance window
  void Validate() const;
};

struct EvalCounts {
  std::size_t n_ref = 0;
  std::size_t n_hyp = 0;
  std::size_t n_identified = 0;
  std::size_t n_missed = 0;
  std::size_t n_multi = 0;
  double sum_abs_dev = 0.0;  // over identified references, seconds

  EvalCounts& operator+=(const EvalCounts& o);
};

struct UttEvalRow {
  std::string utt_id;
  EvalCounts counts;
};

struct EvalReport {
  double idr = 0.0;
  double far = 0.0;
  double mdr = 0.0;
  double dm_sec = 0.0;
  double collar_sec = 1.0;
  EvalCounts counts;
  std::vector<UttEvalRow> rows;
};

// Counts for one utterance. Each reference looks at the hypotheses within
// +-collar: exactly one identifies it, none misses it, several make it a
// false-alarm case.
EvalCounts CountDetections(const ChangePointSet& refs, const ChangePointSet& hyps,
                           const EvalConfig& cfg);

EvalReport ScoreDetection(const ChangePointSet& refs, const ChangePointSet& hyps,
                          const EvalConfig& cfg = {});

struct UttDetections {
  std::string utt_id;
  ChangePointSet refs;
  ChangePointSet hyps;
};

// Pooled over utterances, rows kept in input order.
EvalReport ScoreCorpus(std::span<const UttDetections> utts, const EvalConfig& cfg = {});

// (fa + fr) / n_trials.
double Der(std::size_t fa, std::size_t fr, std::size_t n_trials);

struct AnovaResult {
  double f = 0.0;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
  double ssb = 0.0;
  double ssw = 0.0;
};

// One-way ANOVA. Zero within-group variance gives f = +inf when the group
// means differ and f = 0 when they do not.
AnovaResult AnovaF(std::span<const std::vector<double>> groups);

struct StudyUtterance {
  std::string utt_id;
  FeatureMatrix voiced;
  std::size_t change_row = 0;  // first voiced row after the change
};

// Voiced row at which `change_sec` falls, for building StudyUtterance from
// audio-derived features.
std::size_t VoicedRowAt(const FeatureMatrix& voiced, double change_sec);

struct StudyResult {
  std::size_t x = 0;
  std::vector<double> true_dists;
  std::vector<double> false_dists;
  AnovaResult anova;
  std::vector<std::string> skipped;  // utterance ids without enough margin
};

// True distance: symmetric KL between Gaussians fit on the x voiced rows on
// each side of the change. False distance: the same at a seeded random row
// inside one of the two single-class segments, x rows away from its edges.
StudyResult TrueFalseDistanceStudy(std::span<const StudyUtterance> utts, std::size_t x,
                                   std::uint64_t seed);

inline constexpr std::size_t kStudyWindowSizes[] = {10, 20, 30, 50, 75, 100, 150, 200, 250, 300};

// One study per window size, each with its own derived seed stream.
std::vector<StudyResult> DiscriminationSweep(std::span<const StudyUtterance> utts,
                                             std::span<const std::size_t> xs,
                                             std::uint64_t seed);

// "x,F,n_true,n_false,n_skipped" rows.
std::string FormatDiscriminationCsv(std::span<const StudyResult> results);

struct DurationStats {
  std::string label;
  std::size_t count = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

// Quartiles (linear interpolation between order statistics) of segment
// durations per label, labels in sorted order.
std::vector<DurationStats> SegmentDurationStats(std::span<const Annotation> annots);

using ManifestFields = std::vector<std::pair<std::string, std::string>>;

std::string FormatReportText(const EvalReport& report, const ManifestFields& manifest = {});
std::string FormatReportCsv(const EvalReport& report, const ManifestFields& manifest = {});

}  // namespace lcd
