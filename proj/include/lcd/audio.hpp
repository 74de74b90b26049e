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
#include <string>
#include <vector>

namespace lcd {

// Mono audio with samples in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;
  std::string id;

  std::size_t size() const { return samples.size(); }
  double duration_sec() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Checks the AudioBuffer invariants (non-empty, finite, bounded, rate > 0).
void ValidateAudio(const AudioBuffer& buf);

// Reads a mono PCM-16 or IEEE float-32 WAV file. The buffer id is the file
// stem. No resampling is done: a header rate different from expected_rate is
// an error.
AudioBuffer ReadWav(const std::filesystem::path& path, int expected_rate);

// Writes 16-bit PCM. Samples are rounded to the nearest quantisation level,
// so a round trip through ReadWav is accurate to 2^-15.
void WriteWav(const AudioBuffer& buf, const std::filesystem::path& path);

}  // namespace lcd
