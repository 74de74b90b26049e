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

#include "lcd/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lcd/error.hpp"
#include "lcd/io_util.hpp"
#include "lcd/rng.hpp"

namespace lcd {

std::vector<double> Annotation::change_points() const {
  std::vector<double> cps;
  for (std::size_t i = 1; i < segments.size(); ++i) cps.push_back(segments[i].start_sec);
  return cps;
}

const std::string& Annotation::LabelAt(double t) const {
  Require(!segments.empty(), ErrorCode::kEmptyInput, "annotation has no segments");
  for (const Segment& s : segments) {
    if (t < s.end_sec) return s.label;
  }
  return segments.back().label;
}

void Annotation::Validate() const {
  Require(!segments.empty(), ErrorCode::kFormatError, utt_id + ": no segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    Require(s.start_sec < s.end_sec, ErrorCode::kFormatError,
            utt_id + ": segment with start >= end");
    if (i > 0) {
      const Segment& p = segments[i - 1];
      Require(std::abs(p.end_sec - s.start_sec) < 1e-6, ErrorCode::kFormatError,
              utt_id + ": segments are not contiguous");
      Require(p.label != s.label, ErrorCode::kFormatError,
              utt_id + ": adjacent segments share a label");
    }
  }
}

std::string FormatAnnotations(std::span<const Annotation> annots) {
  std::string out;
  for (const Annotation& a : annots) {
    std::vector<Segment> segs = a.segments;
    std::stable_sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) {
      return x.start_sec < y.start_sec;
    });
    for (const Segment& s : segs) {
      out += a.utt_id + '\t' + io::Fixed(s.start_sec, 6) + '\t' + io::Fixed(s.end_sec, 6) +
             '\t' + s.label + '\n';
    }
  }
  return out;
}

void WriteAnnotations(std::span<const Annotation> annots,
                      const std::filesystem::path& path) {
  io::AtomicWrite(path, FormatAnnotations(annots));
}

std::vector<Annotation> ReadAnnotations(const std::filesystem::path& path) {
  std::vector<Annotation> out;
  std::map<std::string, std::size_t> index;
  for (const std::string& line : io::ReadLines(path)) {
    const auto f = io::Split(line, '\t');
    if (f.size() != 4) {
      Fail(ErrorCode::kFormatError, path.string() + ": expected 4 fields: " + line);
    }
    auto [it, inserted] = index.emplace(f[0], out.size());
    if (inserted) out.push_back(Annotation{f[0], {}});
    out[it->second].segments.push_back(
        Segment{io::ParseDouble(f[1]), io::ParseDouble(f[2]), f[3]});
  }
  for (Annotation& a : out) {
    std::stable_sort(a.segments.begin(), a.segments.end(),
                     [](const Segment& x, const Segment& y) { return x.start_sec < y.start_sec; });
    a.Validate();
  }
  return out;
}

void WriteManifest(std::span<const ManifestEntry> entries,
                   const std::filesystem::path& path) {
  std::string out;
  for (const ManifestEntry& e : entries) out += e.utt_id + '\t' + e.wav_path + '\n';
  io::AtomicWrite(path, out);
}

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path) {
  std::vector<ManifestEntry> out;
  for (const std::string& line : io::ReadLines(path)) {
    const auto f = io::Split(line, '\t');
    if (f.size() != 2) {
      Fail(ErrorCode::kFormatError, path.string() + ": expected 2 fields: " + line);
    }
    std::filesystem::path wav = f[1];
    if (wav.is_relative() && path.has_parent_path()) wav = path.parent_path() / wav;
    out.push_back(ManifestEntry{f[0], wav.string()});
  }
  return out;
}

StitchResult StitchCodeSwitched(std::span<const LabeledPool> pools, int n_changes,
                                std::uint64_t seed, const std::string& utt_id,
                                const StitchOptions& opts) {
  Require(pools.size() == 2, ErrorCode::kInvalidArgument, "stitching needs exactly two pools");
  Require(n_changes >= 1 && n_changes <= 5, ErrorCode::kInvalidArgument,
          "n_changes must be in 1..5");
  Require(pools[0].label != pools[1].label, ErrorCode::kInvalidArgument,
          "pool labels must differ");
  int rate = 0;
  for (const LabeledPool& p : pools) {
    if (p.utterances.empty()) Fail(ErrorCode::kEmptyPool, "pool '" + p.label + "' is empty");
    for (const AudioBuffer& b : p.utterances) {
      if (rate == 0) rate = b.sample_rate;
      if (b.sample_rate != rate) {
        Fail(ErrorCode::kRateMismatch, "pool utterance '" + b.id + "' has rate " +
                                           std::to_string(b.sample_rate) + ", expected " +
                                           std::to_string(rate));
      }
    }
  }

  Rng rng(seed);
  const auto fade = static_cast<std::size_t>(std::lround(opts.crossfade_sec * rate));
  StitchResult res;
  res.audio.sample_rate = rate;
  res.audio.id = utt_id;
  res.annotation.utt_id = utt_id;
  std::vector<double>& out = res.audio.samples;
  std::vector<std::size_t> boundaries{0};

  for (int k = 0; k <= n_changes; ++k) {
    const LabeledPool& pool = pools[static_cast<std::size_t>(k % 2)];
    const AudioBuffer& src = pool.utterances[rng.Below(pool.utterances.size())];
    std::size_t b = 0, e = src.size();
    if (opts.trim_endpoints) {
      const SampleRange r = EndpointRange(src, opts.endpoint);
      b = r.begin;
      e = r.end;
    }
    const auto first = src.samples.begin() + static_cast<std::ptrdiff_t>(b);
    const auto last = src.samples.begin() + static_cast<std::ptrdiff_t>(e);
    if (k == 0) {
      out.assign(first, last);
      continue;
    }
    const std::size_t len = e - b;
    if (fade > 0 && out.size() >= fade && len >= fade) {
      const std::size_t joint = out.size() - fade;
      for (std::size_t j = 0; j < fade; ++j) {
        const double w = (static_cast<double>(j) + 0.5) / static_cast<double>(fade);
        out[joint + j] = out[joint + j] * (1.0 - w) + first[static_cast<std::ptrdiff_t>(j)] * w;
      }
      boundaries.push_back(joint + fade / 2);
      out.insert(out.end(), first + static_cast<std::ptrdiff_t>(fade), last);
    } else {
      boundaries.push_back(out.size());
      out.insert(out.end(), first, last);
    }
  }
  boundaries.push_back(out.size());

  for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
    res.annotation.segments.push_back(
        Segment{static_cast<double>(boundaries[k]) / rate,
                static_cast<double>(boundaries[k + 1]) / rate, pools[k % 2].label});
  }
  res.change_samples.assign(boundaries.begin() + 1, boundaries.end() - 1);
  return res;
}

double MaskShape::operator()(double n) const {
  const double d = n - static_cast<double>(center);
  const double s = d < 0.0 ? sigma_left : sigma_right;
  return std::exp(-d * d / (2.0 * s * s));
}

MaskShape ComputeMaskShape(const AudioBuffer& buf, std::size_t change_sample, int x,
                           const VadConfig& vad_cfg) {
  Require(x >= 1, ErrorCode::kInvalidArgument, "x must be at least 1");
  Require(change_sample < buf.size(), ErrorCode::kInvalidArgument,
          "change sample outside the buffer");
  const VadResult vad = EnergyVad(buf, vad_cfg);
  const FrameLayout layout = ComputeFrameLayout(buf.size(), buf.sample_rate,
                                                vad_cfg.frame_len_sec, vad_cfg.hop_sec);
  std::vector<std::size_t> left, right;
  for (std::size_t f : vad.voiced_index_map) {
    const std::size_t start = f * layout.hop;
    if (start + layout.frame_len <= change_sample) left.push_back(f);
    if (start >= change_sample) right.push_back(f);
  }
  const auto need = static_cast<std::size_t>(x);
  if (left.size() < need || right.size() < need) {
    Fail(ErrorCode::kInsufficientVoicedFrames,
         "need " + std::to_string(x) + " voiced frames per side, have " +
             std::to_string(left.size()) + " left and " + std::to_string(right.size()) +
             " right");
  }
  MaskShape shape;
  shape.center = change_sample;
  shape.left_boundary = left[left.size() - need] * layout.hop;
  shape.right_boundary = right[need - 1] * layout.hop + layout.frame_len;
  // G = 0.5 at distance w  <=>  sigma = w / sqrt(2 ln 2).
  const double k = std::sqrt(2.0 * std::log(2.0));
  shape.sigma_left = static_cast<double>(change_sample - shape.left_boundary) / k;
  shape.sigma_right = static_cast<double>(shape.right_boundary - change_sample) / k;
  return shape;
}

MaskedStimulus GenerateMaskedStimulus(const AudioBuffer& buf, std::size_t change_sample,
                                      int x, const VadConfig& vad_cfg) {
  MaskedStimulus res;
  res.shape = ComputeMaskShape(buf, change_sample, x, vad_cfg);
  AudioBuffer masked = buf;
  for (std::size_t n = 0; n < masked.size(); ++n) {
    masked.samples[n] *= res.shape(static_cast<double>(n));
  }
  SampleRange r = EndpointRange(masked, vad_cfg);
  r.begin = std::min(r.begin, res.shape.left_boundary);
  r.end = std::min(std::max(r.end, res.shape.right_boundary), masked.size());
  res.trim_begin = r.begin;
  res.change_sample = change_sample - r.begin;
  res.audio.sample_rate = buf.sample_rate;
  res.audio.id = buf.id;
  res.audio.samples.assign(masked.samples.begin() + static_cast<std::ptrdiff_t>(r.begin),
                           masked.samples.begin() + static_cast<std::ptrdiff_t>(r.end));
  return res;
}

}  // namespace lcd
