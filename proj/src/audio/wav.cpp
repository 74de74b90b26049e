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
#include <cstdint>
#include <cstring>
#include <string>

#include "lcd/audio.hpp"
#include "lcd/error.hpp"
#include "lcd/io_util.hpp"

namespace lcd {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t U16(const std::string& b, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                    (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t U32(const std::string& b, std::size_t off) {
  return static_cast<std::uint32_t>(U16(b, off)) |
         (static_cast<std::uint32_t>(U16(b, off + 2)) << 16);
}

void PutU16(std::string& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string& b, std::uint32_t v) {
  PutU16(b, static_cast<std::uint16_t>(v & 0xffff));
  PutU16(b, static_cast<std::uint16_t>(v >> 16));
}

}  // namespace

void ValidateAudio(const AudioBuffer& buf) {
  Require(buf.sample_rate > 0, ErrorCode::kInvalidArgument,
          "sample rate must be positive");
  Require(!buf.samples.empty(), ErrorCode::kTooShort, "empty audio buffer");
  for (double s : buf.samples) {
    Require(std::isfinite(s) && std::abs(s) <= 1.0, ErrorCode::kInvalidArgument,
            "audio samples must be finite and within [-1, 1]");
  }
}

AudioBuffer ReadWav(const std::filesystem::path& path, int expected_rate) {
  const std::string bytes = io::ReadFile(path);
  const std::string name = path.string();
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    Fail(ErrorCode::kUnsupportedFormat, name + ": not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_off = 0, data_len = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t len = U32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (len < 16 || body + len > bytes.size()) {
        Fail(ErrorCode::kUnsupportedFormat, name + ": truncated fmt chunk");
      }
      format = U16(bytes, body);
      channels = U16(bytes, body + 2);
      rate = U32(bytes, body + 4);
      bits = U16(bytes, body + 14);
      if (format == kFormatExtensible && len >= 26) {
        format = U16(bytes, body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      data_off = body;
      data_len = std::min<std::size_t>(len, bytes.size() - body);
      have_data = true;
    }
    pos = body + len + (len & 1u);
  }

  if (!have_fmt || !have_data) {
    Fail(ErrorCode::kUnsupportedFormat, name + ": missing fmt or data chunk");
  }
  if (channels != 1) {
    Fail(ErrorCode::kUnsupportedFormat,
         name + ": " + std::to_string(channels) + " channels (mono required)");
  }
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    Fail(ErrorCode::kUnsupportedFormat,
         name + ": unsupported encoding (format " + std::to_string(format) +
             ", " + std::to_string(bits) + " bits)");
  }
  if (static_cast<int>(rate) != expected_rate) {
    Fail(ErrorCode::kRateMismatch, name + ": " + std::to_string(rate) +
                                       " Hz, expected " +
                                       std::to_string(expected_rate));
  }

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(rate);
  buf.id = path.stem().string();
  if (pcm16) {
    const std::size_t n = data_len / 2;
    buf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(U16(bytes, data_off + 2 * i));
      buf.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else {
    const std::size_t n = data_len / 4;
    buf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t raw = U32(bytes, data_off + 4 * i);
      float f;
      std::memcpy(&f, &raw, sizeof(f));
      if (!std::isfinite(f)) {
        Fail(ErrorCode::kUnsupportedFormat, name + ": non-finite sample");
      }
      buf.samples[i] = std::clamp(static_cast<double>(f), -1.0, 1.0);
    }
  }
  return buf;
}

void WriteWav(const AudioBuffer& buf, const std::filesystem::path& path) {
  ValidateAudio(buf);
  const auto n = static_cast<std::uint32_t>(buf.samples.size());
  std::string b;
  b.reserve(44 + 2 * static_cast<std::size_t>(n));
  b += "RIFF";
  PutU32(b, 36 + 2 * n);
  b += "WAVE";
  b += "fmt ";
  PutU32(b, 16);
  PutU16(b, kFormatPcm);
  PutU16(b, 1);
  PutU32(b, static_cast<std::uint32_t>(buf.sample_rate));
  PutU32(b, static_cast<std::uint32_t>(buf.sample_rate) * 2);
  PutU16(b, 2);
  PutU16(b, 16);
  b += "data";
  PutU32(b, 2 * n);
  for (double s : buf.samples) {
    const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    PutU16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  io::AtomicWrite(path, b);
}

}  // namespace lcd
