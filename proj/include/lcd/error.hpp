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

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcd {

enum class ErrorCode {
  kUnsupportedFormat,
  kRateMismatch,
  kIoError,
  kEmptyPool,
  kInsufficientVoicedFrames,
  kTooShort,
  kAllUnvoiced,
  kLengthMismatch,
  kTooFewFrames,
  kDimMismatch,
  kEmptyInput,
  kModelShapeMismatch,
  kRankDeficient,
  kSingularCovariance,
  kZeroVector,
  kInsufficientClasses,
  kInsufficientVectors,
  kOneClassOnly,
  kFormatError,
  kExtractorMismatch,
  kMissingModels,
  kEmptyReference,
  kInvalidCounts,
  kInsufficientMargin,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void Require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) Fail(code, what);
}

}  // namespace lcd
