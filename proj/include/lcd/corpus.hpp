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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lcd/audio.hpp"
#include "lcd/vad.hpp"

namespace lcd {

struct Segment {
  double start_sec = 0.0;
  double end_sec = 0.0;
  std::string label;
};

// Ground truth for one utterance: contiguous, non-overlapping segments whose
// neighbours carry different labels. Change points are the interior
// boundaries.
struct Annotation {
  std::string utt_id;
  std::vector<Segment> segments;

  std::vector<double> change_points() const;

  // Label of the segment containing time t (the last segment for t past the end).
  const std::string& LabelAt(double t) const;

  void Validate() const;
};

// Rows "utt_id<TAB>start<TAB>end<TAB>label", times with 6 decimals, sorted by
// utterance then start.
void WriteAnnotations(std::span<const Annotation> annots,
                      const std::filesystem::path& path);
std::vector<Annotation> ReadAnnotations(const std::filesystem::path& path);
std::string FormatAnnotations(std::span<const Annotation> annots);

struct ManifestEntry {
  std::string utt_id;
  std::string wav_path;
};
void WriteManifest(std::span<const ManifestEntry> entries,
                   const std::filesystem::path& path);
// Relative wav paths are resolved against the manifest's directory.
std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path);

struct LabeledPool {
  std::string label;
  std::vector<AudioBuffer> utterances;
};

struct StitchOptions {
  // Linear crossfade at each joint; 0 disables it. The change point sits at
  // the crossfade midpoint.
  double crossfade_sec = 0.010;
  bool trim_endpoints = true;
  VadConfig endpoint;
};

struct StitchResult {
  AudioBuffer audio;
  Annotation annotation;
  std::vector<std::size_t> change_samples;
};

// Builds an utterance with n_changes label changes by alternately drawing
// from pools[0] and pools[1] (pools[0] first).
StitchResult StitchCodeSwitched(std::span<const LabeledPool> pools, int n_changes,
                                std::uint64_t seed, const std::string& utt_id,
                                const StitchOptions& opts = {});

// Asymmetric Gaussian window  G(n) = exp(-(n - c)^2 / (2 sigma^2)) with one
// sigma per side of the centre.
struct MaskShape {
  std::size_t center = 0;
  double sigma_left = 1.0;
  double sigma_right = 1.0;
  // Outer sample boundaries of the x-th voiced frame on each side; G = 0.5
  // there.
  std::size_t left_boundary = 0;
  std::size_t right_boundary = 0;

  double operator()(double n) const;
};

MaskShape ComputeMaskShape(const AudioBuffer& buf, std::size_t change_sample,
                           int x, const VadConfig& vad_cfg = {});

struct MaskedStimulus {
  AudioBuffer audio;
  MaskShape shape;
  // Offset of the trimmed output inside the source, and the change position
  // inside the output.
  std::size_t trim_begin = 0;
  std::size_t change_sample = 0;
};

// S_m(n) = S(n) G(n), then endpoint-trimmed with the energy endpointer. The
// trim never cuts into [left_boundary, right_boundary), so the x voiced
// frames on each side survive.
MaskedStimulus GenerateMaskedStimulus(const AudioBuffer& buf,
                                      std::size_t change_sample, int x,
                                      const VadConfig& vad_cfg = {});

}  // namespace lcd
