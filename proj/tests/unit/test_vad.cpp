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

#include <cmath>
#include <numbers>

#include "lcd/vad.hpp"
#include "support/expect.hpp"

namespace lcd {
namespace {

using testing::CodeOf;

AudioBuffer Constant(double a, std::size_t n) {
  AudioBuffer b;
  b.samples.assign(n, a);
  return b;
}

TEST(FrameEnergies, SilenceAndConstant) {
  for (double e : FrameEnergies(Constant(0.0, 1600))) EXPECT_EQ(e, 0.0);
  for (double e : FrameEnergies(Constant(0.5, 1600))) EXPECT_DOUBLE_EQ(e, 0.25);
}

TEST(FrameEnergies, HalfSilentHalfTone) {
  AudioBuffer b = Constant(0.0, 32000);
  for (std::size_t i = 16000; i < 32000; ++i) b.samples[i] = 0.8 * std::sin(0.05 * i);
  const auto e = FrameEnergies(b);
  // Frames entirely inside either half.
  for (std::size_t t = 0; t < 98; ++t) EXPECT_EQ(e[t], 0.0);
  for (std::size_t t = 100; t < e.size(); ++t) EXPECT_NEAR(e[t], 0.32, 0.01);
}

TEST(EnergyVad, ConstantIsAllVoiced) {
  const VadResult v = EnergyVad(Constant(0.3, 8000));
  EXPECT_EQ(v.num_voiced(), v.voiced_mask.size());
  EXPECT_NEAR(v.threshold_used, 0.06 * 0.09, 1e-15);
}

TEST(EnergyVad, SilenceIsAnError) {
  EXPECT_EQ(CodeOf([] { EnergyVad(Constant(0.0, 8000)); }), ErrorCode::kAllUnvoiced);
}

TEST(EnergyVad, ToneBurstsFollowTheEnvelope) {
  // 100 ms on, 100 ms off.
  AudioBuffer b = Constant(0.0, 16000);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if ((i / 1600) % 2 == 0) b.samples[i] = 0.5 * std::sin(2 * std::numbers::pi * 440 * i / 16000.0);
  }
  const VadResult v = EnergyVad(b);
  std::size_t on_frames = 0;
  for (std::size_t t = 0; t < v.voiced_mask.size(); ++t) {
    const std::size_t s = t * 160, e = s + 320;
    bool inside_on = false, touches_on = false;
    for (std::size_t burst = 0; burst < b.size(); burst += 3200) {
      inside_on |= s >= burst && e <= burst + 1600;
      touches_on |= s < burst + 1600 && e > burst;
    }
    if (inside_on) {
      EXPECT_EQ(v.voiced_mask[t], 1) << t;
      ++on_frames;
    }
    if (!touches_on) EXPECT_EQ(v.voiced_mask[t], 0) << t;
  }
  // At most one extra boundary frame per edge.
  const std::size_t edges = 2 * 5;
  EXPECT_LE(v.num_voiced(), on_frames + edges);
}

TEST(EnergyVad, AmplitudeScalingKeepsMask) {
  AudioBuffer b = Constant(0.0, 16000);
  for (std::size_t i = 0; i < b.size(); ++i) b.samples[i] = 0.4 * std::sin(0.01 * i) * std::sin(0.0007 * i);
  const VadResult base = EnergyVad(b);
  for (double c : {0.01, 0.3, 2.0}) {
    AudioBuffer s = b;
    for (double& x : s.samples) x *= c;
    EXPECT_EQ(EnergyVad(s).voiced_mask, base.voiced_mask) << c;
  }
}

TEST(EnergyVad, MapMatchesMask) {
  const VadResult v = VadFromEnergies({0.0, 5.0, 0.5, 7.0, 7.0, 0.0}, 0.06);
  EXPECT_EQ(v.voiced_index_map, (std::vector<std::size_t>{1, 2, 3, 4}));
  EXPECT_DOUBLE_EQ(v.threshold_used, 0.06 * 19.5 / 6.0);
  for (std::size_t i = 1; i < v.voiced_index_map.size(); ++i) {
    EXPECT_LT(v.voiced_index_map[i - 1], v.voiced_index_map[i]);
  }
}

TEST(EndpointRange, SpansFirstToLastVoicedFrame) {
  AudioBuffer b = Constant(0.0, 8000);
  for (std::size_t i = 1600; i < 4800; ++i) b.samples[i] = 0.5;
  const SampleRange r = EndpointRange(b);
  EXPECT_LE(r.begin, 1600u);
  EXPECT_GE(r.end, 4800u);
  EXPECT_GT(r.begin, 1600u - 320u);
  EXPECT_LT(r.end, 4800u + 320u);
}

FeatureMatrix Indexed(std::size_t T) {
  FeatureMatrix fm(T, 2, FeatureKind::kGeneric);
  for (std::size_t t = 0; t < T; ++t) {
    fm.at(t, 0) = static_cast<double>(t);
    fm.at(t, 1) = -static_cast<double>(t);
  }
  return fm;
}

TEST(SelectVoiced, AllVoicedIsIdentity) {
  const FeatureMatrix fm = Indexed(6);
  const FeatureMatrix out = SelectVoiced(fm, VadFromEnergies(std::vector<double>(6, 1.0), 0.06));
  EXPECT_EQ(out.data, fm.data);
  for (std::size_t t = 0; t < 6; ++t) EXPECT_EQ(out.source_frame(t), t);
}

TEST(SelectVoiced, KeepsVoicedRowsAndTimes) {
  const FeatureMatrix fm = Indexed(6);
  const VadResult v = VadFromEnergies({0.0, 5.0, 0.0, 7.0, 7.0, 0.0}, 0.06);
  const FeatureMatrix out = SelectVoiced(fm, v);
  ASSERT_EQ(out.num_frames, 3u);
  EXPECT_NO_THROW(out.Validate());
  for (std::size_t p = 0; p < out.num_frames; ++p) {
    EXPECT_EQ(out.at(p, 0), static_cast<double>(v.voiced_index_map[p]));
    EXPECT_DOUBLE_EQ(out.frame_center_sec(p), fm.frame_center_sec(v.voiced_index_map[p]));
  }
  EXPECT_EQ(CodeOf([&] { SelectVoiced(Indexed(5), v); }), ErrorCode::kLengthMismatch);
}

}  // namespace
}  // namespace lcd
