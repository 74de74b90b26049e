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
#include <vector>

#include "lcd/audio.hpp"
#include "lcd/features.hpp"

namespace lcd {

struct VadConfig {
  // A frame is voiced when its energy exceeds ratio x the utterance mean.
  double ratio = 0.06;
  double frame_len_sec = 0.020;
  double hop_sec = 0.010;
};

struct VadResult {
  std::vector<std::uint8_t> voiced_mask;
  std::vector<std::size_t> voiced_index_map;
  double threshold_used = 0.0;
  std::vector<double> frame_energies;

  std::size_t num_voiced() const { return voiced_index_map.size(); }
};

// Mean squared amplitude per frame.
std::vector<double> FrameEnergies(const AudioBuffer& buf, double frame_len_sec = 0.020,
                                  double hop_sec = 0.010);

// Thresholds precomputed energies; throws AllUnvoiced when nothing passes.
VadResult VadFromEnergies(std::vector<double> energies, double ratio);

VadResult EnergyVad(const AudioBuffer& buf, const VadConfig& cfg = {});

// Sample range [begin, end) from the first to the last voiced frame.
struct SampleRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};
SampleRange EndpointRange(const AudioBuffer& buf, const VadConfig& cfg = {});

// Keeps the voiced rows and attaches the voiced-to-source index map. Frame
// start times of the source stream are preserved.
FeatureMatrix SelectVoiced(const FeatureMatrix& fm, const VadResult& vad);

// One "frame_idx<TAB>energy<TAB>voiced" row per frame.
void WriteVadDump(const VadResult& vad, const std::filesystem::path& path);

}  // namespace lcd
