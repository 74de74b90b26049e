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

#include "lcd/vad.hpp"

#include <numeric>
#include <string>

#include "lcd/error.hpp"
#include "lcd/io_util.hpp"

namespace lcd {

std::vector<double> FrameEnergies(const AudioBuffer& buf, double frame_len_sec,
                                  double hop_sec) {
  const FrameLayout layout =
      ComputeFrameLayout(buf.size(), buf.sample_rate, frame_len_sec, hop_sec);
  std::vector<double> energies(layout.num_frames);
  for (std::size_t t = 0; t < layout.num_frames; ++t) {
    const double* x = buf.samples.data() + t * layout.hop;
    double s = 0.0;
    for (std::size_t i = 0; i < layout.frame_len; ++i) s += x[i] * x[i];
    energies[t] = s / static_cast<double>(layout.frame_len);
  }
  return energies;
}

VadResult VadFromEnergies(std::vector<double> energies, double ratio) {
  Require(!energies.empty(), ErrorCode::kTooShort, "no frames for VAD");
  Require(ratio >= 0.0, ErrorCode::kInvalidArgument, "VAD ratio must be >= 0");
  VadResult res;
  const double mean = std::accumulate(energies.begin(), energies.end(), 0.0) /
                      static_cast<double>(energies.size());
  res.threshold_used = ratio * mean;
  res.voiced_mask.resize(energies.size());
  for (std::size_t t = 0; t < energies.size(); ++t) {
    const bool voiced = energies[t] > res.threshold_used;
    res.voiced_mask[t] = voiced ? 1 : 0;
    if (voiced) res.voiced_index_map.push_back(t);
  }
  res.frame_energies = std::move(energies);
  if (res.voiced_index_map.empty()) {
    Fail(ErrorCode::kAllUnvoiced, "no frame exceeds the energy threshold");
  }
  return res;
}

VadResult EnergyVad(const AudioBuffer& buf, const VadConfig& cfg) {
  return VadFromEnergies(FrameEnergies(buf, cfg.frame_len_sec, cfg.hop_sec), cfg.ratio);
}

SampleRange EndpointRange(const AudioBuffer& buf, const VadConfig& cfg) {
  const VadResult vad = EnergyVad(buf, cfg);
  const FrameLayout layout =
      ComputeFrameLayout(buf.size(), buf.sample_rate, cfg.frame_len_sec, cfg.hop_sec);
  SampleRange r;
  r.begin = vad.voiced_index_map.front() * layout.hop;
  r.end = vad.voiced_index_map.back() * layout.hop + layout.frame_len;
  return r;
}

FeatureMatrix SelectVoiced(const FeatureMatrix& fm, const VadResult& vad) {
  if (fm.num_frames != vad.voiced_mask.size()) {
    Fail(ErrorCode::kLengthMismatch,
         "feature frames (" + std::to_string(fm.num_frames) + ") != VAD frames (" +
             std::to_string(vad.voiced_mask.size()) + ")");
  }
  FeatureMatrix out;
  out.num_frames = vad.voiced_index_map.size();
  out.dim = fm.dim;
  out.frame_len_sec = fm.frame_len_sec;
  out.hop_sec = fm.hop_sec;
  out.kind = fm.kind;
  out.frame_start_times = fm.frame_start_times;
  out.voiced_mask = vad.voiced_mask;
  out.voiced_index_map = vad.voiced_index_map;
  out.data.reserve(out.num_frames * out.dim);
  for (std::size_t src : vad.voiced_index_map) {
    const auto r = fm.row(src);
    out.data.insert(out.data.end(), r.begin(), r.end());
  }
  return out;
}

void WriteVadDump(const VadResult& vad, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t t = 0; t < vad.frame_energies.size(); ++t) {
    out += std::to_string(t);
    out += '\t';
    out += io::Exact(vad.frame_energies[t]);
    out += '\t';
    out += vad.voiced_mask[t] ? '1' : '0';
    out += '\n';
  }
  io::AtomicWrite(path, out);
}

}  // namespace lcd
