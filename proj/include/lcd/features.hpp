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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lcd/audio.hpp"

namespace lcd {

enum class FeatureKind {
  kMfcc13,
  kMfcc39,
  kLpcc,
  kSdc,
  // Features that did not come from audio (imports, synthetic streams, tests).
  kGeneric,
};

std::string_view FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view name);

// Non-owning view of `rows` consecutive feature rows.
struct FrameView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t dim = 0;

  std::span<const double> row(std::size_t t) const { return {data + t * dim, dim}; }
  const double* row_ptr(std::size_t t) const { return data + t * dim; }
  FrameView slice(std::size_t begin, std::size_t end) const {
    return {data + begin * dim, end - begin, dim};
  }
};

// T frames of D-dimensional features stored row-major.
//
// When voice activity detection has been applied, voiced_mask describes the
// frames of the *source* stream and voiced_index_map[p] is the source frame
// index of row p. frame_start_times is kept per source frame (it has
// source-frame length in that case) so that voiced positions can be mapped
// back to seconds.
struct FeatureMatrix {
  std::size_t num_frames = 0;
  std::size_t dim = 0;
  std::vector<double> data;
  double frame_len_sec = 0.020;
  double hop_sec = 0.010;
  std::vector<double> frame_start_times;
  FeatureKind kind = FeatureKind::kGeneric;
  std::vector<std::uint8_t> voiced_mask;
  std::vector<std::size_t> voiced_index_map;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t frames, std::size_t d, FeatureKind k,
                double frame_len = 0.020, double hop = 0.010);

  std::span<const double> row(std::size_t t) const {
    return {data.data() + t * dim, dim};
  }
  std::span<double> row(std::size_t t) { return {data.data() + t * dim, dim}; }
  double& at(std::size_t t, std::size_t d) { return data[t * dim + d]; }
  double at(std::size_t t, std::size_t d) const { return data[t * dim + d]; }

  FrameView view() const { return {data.data(), num_frames, dim}; }
  FrameView view(std::size_t begin, std::size_t end) const {
    return view().slice(begin, end);
  }

  bool has_voiced_map() const { return !voiced_index_map.empty(); }

  // Source frame index of row t (identity when no VAD was applied).
  std::size_t source_frame(std::size_t t) const {
    return has_voiced_map() ? voiced_index_map[t] : t;
  }

  // Centre of the frame backing row t, in seconds.
  double frame_center_sec(std::size_t t) const {
    return frame_start_times[source_frame(t)] + 0.5 * frame_len_sec;
  }

  void Validate() const;
};

struct FrameLayout {
  std::size_t frame_len = 0;  // samples
  std::size_t hop = 0;        // samples
  std::size_t num_frames = 0;
};

// T = 1 + floor((L - frame_len) / hop); a trailing partial frame is dropped.
FrameLayout ComputeFrameLayout(std::size_t num_samples, int sample_rate,
                               double frame_len_sec, double hop_sec);

std::vector<std::vector<double>> FrameSignal(const AudioBuffer& buf,
                                             double frame_len_sec = 0.020,
                                             double hop_sec = 0.010);

struct MfccOptions {
  int n_coeffs = 13;
  int n_mels = 26;
  double preemph = 0.97;
  double frame_len_sec = 0.020;
  double hop_sec = 0.010;
  double log_floor = 1e-10;
};

FeatureMatrix Mfcc(const AudioBuffer& buf, const MfccOptions& opts = {});

// Regression deltas over +-2 frames with edge replication, then deltas of the
// deltas: D -> 3D. Requires T >= 5.
FeatureMatrix AppendDeltas(const FeatureMatrix& base);

struct LpcResult {
  std::vector<double> a;  // a[0] = 1; A(z) = sum_k a[k] z^-k
  double error = 0.0;     // final prediction error power
};

// Levinson-Durbin recursion on autocorrelation r[0..order].
LpcResult LevinsonDurbin(std::span<const double> autocorr, int order);

// Hamming-windowed autocorrelation with 1e-9 r[0] diagonal loading, followed
// by Levinson-Durbin. nullopt for an all-zero frame.
std::optional<LpcResult> FrameLpc(std::span<const double> frame, int order);

// Cepstrum of the all-pole model gain/A(z): c[0] = log(error), c[1..n-1] by
// the standard recursion.
std::vector<double> LpcToCepstrum(const LpcResult& lpc, int n_coeffs);

struct LpccOptions {
  int lpc_order = 12;
  int n_coeffs = 13;
  double frame_len_sec = 0.020;
  double hop_sec = 0.010;
};

struct LpccResult {
  FeatureMatrix features;
  // 1 where the frame was all zeros; those rows are zero vectors.
  std::vector<std::uint8_t> degenerate;
};

LpccResult Lpcc(const AudioBuffer& buf, const LpccOptions& opts = {});

// Shifted delta cepstra N-d-P-k.
struct SdcOptions {
  int n = 7;
  int d = 1;
  int p = 3;
  int k = 7;
};

FeatureMatrix Sdc(const FeatureMatrix& base, const SdcOptions& opts = {});

// Convenience front end used by the pipeline.
FeatureMatrix ExtractFeatures(const AudioBuffer& buf, FeatureKind kind);

// Binary dump: "FTR1", u32 T, u32 D, f64 frame_len_sec, f64 hop_sec,
// row-major f32 data, then T voiced-mask bytes (all little-endian).
void WriteFeatureDump(const FeatureMatrix& fm, const std::filesystem::path& path);
FeatureMatrix ReadFeatureDump(const std::filesystem::path& path);

}  // namespace lcd
