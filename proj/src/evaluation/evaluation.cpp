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
#include <limits>
#include <map>

#include "lcd/error.hpp"
#include "lcd/evaluation.hpp"
#include "lcd/gaussian.hpp"
#include "lcd/io_util.hpp"
#include "lcd/rng.hpp"

namespace lcd {

void EvalConfig::Validate() const {
  Require(collar_sec > 0.0 && std::isfinite(collar_sec), ErrorCode::kInvalidArgument,
          "collar must be positive");
}

EvalCounts& EvalCounts::operator+=(const EvalCounts& o) {
  n_ref += o.n_ref;
  n_hyp += o.n_hyp;
  n_identified += o.n_identified;
  n_missed += o.n_missed;
  n_multi += o.n_multi;
  sum_abs_dev += o.sum_abs_dev;
  return *this;
}

EvalCounts CountDetections(const ChangePointSet& refs, const ChangePointSet& hyps,
                           const EvalConfig& cfg) {
  cfg.Validate();
  EvalCounts c;
  c.n_ref = refs.size();
  c.n_hyp = hyps.size();
  for (const ChangePoint& r : refs.points) {
    std::size_t within = 0;
    double dev = 0.0;
    for (const ChangePoint& h : hyps.points) {
      const double d = std::abs(h.time_sec - r.time_sec);
      if (d <= cfg.collar_sec) {
        ++within;
        dev = d;
      }
    }
    if (within == 0) {
      ++c.n_missed;
    } else if (within == 1) {
      ++c.n_identified;
      c.sum_abs_dev += dev;
    } else {
      ++c.n_multi;
    }
  }
  return c;
}

namespace {

EvalReport Finish(EvalCounts total, std::vector<UttEvalRow> rows, double collar) {
  if (total.n_ref == 0) Fail(ErrorCode::kEmptyReference, "no reference change points");
  EvalReport r;
  const double n = static_cast<double>(total.n_ref);
  r.idr = 100.0 * static_cast<double>(total.n_identified) / n;
  r.mdr = 100.0 * static_cast<double>(total.n_missed) / n;
  r.far = 100.0 * static_cast<double>(total.n_multi) / n;
  r.dm_sec = total.n_identified ? total.sum_abs_dev / static_cast<double>(total.n_identified)
                                : 0.0;
  r.collar_sec = collar;
  r.counts = total;
  r.rows = std::move(rows);
  return r;
}

}  // namespace

EvalReport ScoreDetection(const ChangePointSet& refs, const ChangePointSet& hyps,
                          const EvalConfig& cfg) {
  if (refs.empty()) Fail(ErrorCode::kEmptyReference, "no reference change points");
  const EvalCounts c = CountDetections(refs, hyps, cfg);
  return Finish(c, {{"", c}}, cfg.collar_sec);
}

EvalReport ScoreCorpus(std::span<const UttDetections> utts, const EvalConfig& cfg) {
  EvalCounts total;
  std::vector<UttEvalRow> rows;
  rows.reserve(utts.size());
  for (const UttDetections& u : utts) {
    const EvalCounts c = CountDetections(u.refs, u.hyps, cfg);
    total += c;
    rows.push_back({u.utt_id, c});
  }
  return Finish(total, std::move(rows), cfg.collar_sec);
}

double Der(std::size_t fa, std::size_t fr, std::size_t n_trials) {
  if (n_trials == 0 || fa + fr > n_trials) {
    Fail(ErrorCode::kInvalidCounts, "DER needs n_trials > 0 and fa + fr <= n_trials");
  }
  return static_cast<double>(fa + fr) / static_cast<double>(n_trials);
}

AnovaResult AnovaF(std::span<const std::vector<double>> groups) {
  Require(groups.size() >= 2, ErrorCode::kInvalidArgument, "ANOVA needs at least two groups");
  std::size_t n = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    Require(g.size() >= 2, ErrorCode::kInvalidArgument, "each ANOVA group needs two values");
    n += g.size();
    for (double v : g) grand += v;
  }
  grand /= static_cast<double>(n);

  AnovaResult r;
  for (const auto& g : groups) {
    double m = 0.0;
    for (double v : g) m += v;
    m /= static_cast<double>(g.size());
    r.ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) r.ssw += (v - m) * (v - m);
  }
  r.df1 = groups.size() - 1;
  r.df2 = n - groups.size();
  if (r.ssw == 0.0) {
    r.f = r.ssb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  } else {
    r.f = (r.ssb / static_cast<double>(r.df1)) / (r.ssw / static_cast<double>(r.df2));
  }
  return r;
}

std::size_t VoicedRowAt(const FeatureMatrix& voiced, double change_sec) {
  std::size_t t = 0;
  while (t < voiced.num_frames && voiced.frame_center_sec(t) < change_sec) ++t;
  return t;
}

StudyResult TrueFalseDistanceStudy(std::span<const StudyUtterance> utts, std::size_t x,
                                   std::uint64_t seed) {
  Require(x >= 2, ErrorCode::kInvalidArgument, "study window must be at least two frames");
  StudyResult res;
  res.x = x;
  for (const StudyUtterance& u : utts) {
    const std::size_t T = u.voiced.num_frames;
    const std::size_t c = u.change_row;
    // Candidate false points f need [f - x, f + x) inside one segment.
    std::size_t left_count = (c >= 2 * x) ? c - 2 * x + 1 : 0;
    std::size_t right_count = (T >= c + 2 * x) ? T - c - 2 * x + 1 : 0;
    if (c < x || c + x > T || left_count + right_count == 0) {
      res.skipped.push_back(u.utt_id);
      continue;
    }
    const FrameView v = u.voiced.view();
    auto distance = [&](std::size_t at) {
      return SymmetricKl(FitDiagGaussian(v.slice(at - x, at)), FitDiagGaussian(v.slice(at, at + x)));
    };
    res.true_dists.push_back(distance(c));

    Rng rng(DeriveSeed(DeriveSeed(seed, u.utt_id), static_cast<std::uint64_t>(x)));
    const auto pick = static_cast<std::size_t>(rng.Below(left_count + right_count));
    const std::size_t f = pick < left_count ? x + pick : c + x + (pick - left_count);
    res.false_dists.push_back(distance(f));
  }
  if (res.true_dists.size() >= 2) {
    const std::vector<std::vector<double>> groups{res.true_dists, res.false_dists};
    res.anova = AnovaF(groups);
  }
  return res;
}

std::vector<StudyResult> DiscriminationSweep(std::span<const StudyUtterance> utts,
                                             std::span<const std::size_t> xs,
                                             std::uint64_t seed) {
  std::vector<StudyResult> out;
  out.reserve(xs.size());
  for (std::size_t x : xs) out.push_back(TrueFalseDistanceStudy(utts, x, seed));
  return out;
}

std::string FormatDiscriminationCsv(std::span<const StudyResult> results) {
  std::string out = "x,F,n_true,n_false,n_skipped\n";
  for (const StudyResult& r : results) {
    out += std::to_string(r.x) + ',' + io::Exact(r.anova.f) + ',' +
           std::to_string(r.true_dists.size()) + ',' + std::to_string(r.false_dists.size()) +
           ',' + std::to_string(r.skipped.size()) + '\n';
  }
  return out;
}

namespace {

double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<DurationStats> SegmentDurationStats(std::span<const Annotation> annots) {
  Require(!annots.empty(), ErrorCode::kEmptyInput, "no annotations");
  std::map<std::string, std::vector<double>> by_label;
  for (const Annotation& a : annots) {
    for (const Segment& s : a.segments) by_label[s.label].push_back(s.end_sec - s.start_sec);
  }
  std::vector<DurationStats> out;
  for (auto& [label, d] : by_label) {
    std::sort(d.begin(), d.end());
    out.push_back({label, d.size(), Quantile(d, 0.25), Quantile(d, 0.5), Quantile(d, 0.75)});
  }
  return out;
}

std::string FormatReportText(const EvalReport& r, const ManifestFields& manifest) {
  std::string out;
  out += "collar_sec  " + io::Fixed(r.collar_sec, 3) + "\n";
  out += "references  " + std::to_string(r.counts.n_ref) + "\n";
  out += "hypotheses  " + std::to_string(r.counts.n_hyp) + "\n";
  out += "IDR %       " + io::Fixed(r.idr, 2) + "\n";
  out += "FAR %       " + io::Fixed(r.far, 2) + "\n";
  out += "MDR %       " + io::Fixed(r.mdr, 2) + "\n";
  out += "Dm s        " + io::Fixed(r.dm_sec, 4) + "\n";
  out += "IDR+FAR+MDR " + io::Fixed(r.idr + r.far + r.mdr, 6) + "\n";
  if (!manifest.empty()) {
    out += "\n";
    for (const auto& [k, v] : manifest) out += k + " = " + v + "\n";
  }
  return out;
}

std::string FormatReportCsv(const EvalReport& r, const ManifestFields& manifest) {
  std::string out = "metric,value\n";
  out += "collar_sec," + io::Fixed(r.collar_sec, 6) + "\n";
  out += "n_ref," + std::to_string(r.counts.n_ref) + "\n";
  out += "n_hyp," + std::to_string(r.counts.n_hyp) + "\n";
  out += "n_identified," + std::to_string(r.counts.n_identified) + "\n";
  out += "n_missed," + std::to_string(r.counts.n_missed) + "\n";
  out += "n_multi," + std::to_string(r.counts.n_multi) + "\n";
  out += "idr," + io::Fixed(r.idr, 6) + "\n";
  out += "far," + io::Fixed(r.far, 6) + "\n";
  out += "mdr," + io::Fixed(r.mdr, 6) + "\n";
  out += "dm_sec," + io::Fixed(r.dm_sec, 6) + "\n";
  for (const auto& [k, v] : manifest) out += "manifest." + k + "," + v + "\n";
  out += "\nutt_id,n_ref,n_hyp,identified,missed,multi,sum_abs_dev_sec\n";
  for (const UttEvalRow& row : r.rows) {
    const EvalCounts& c = row.counts;
    out += row.utt_id + "," + std::to_string(c.n_ref) + "," + std::to_string(c.n_hyp) + "," +
           std::to_string(c.n_identified) + "," + std::to_string(c.n_missed) + "," +
           std::to_string(c.n_multi) + "," + io::Fixed(c.sum_abs_dev, 6) + "\n";
  }
  return out;
}

}  // namespace lcd
