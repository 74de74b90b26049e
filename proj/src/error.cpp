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

#include "lcd/error.hpp"

namespace lcd {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kRateMismatch: return "RateMismatch";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kInsufficientVoicedFrames: return "InsufficientVoicedFrames";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kAllUnvoiced: return "AllUnvoiced";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooFewFrames: return "TooFewFrames";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kModelShapeMismatch: return "ModelShapeMismatch";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kInsufficientClasses: return "InsufficientClasses";
    case ErrorCode::kInsufficientVectors: return "InsufficientVectors";
    case ErrorCode::kOneClassOnly: return "OneClassOnly";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kExtractorMismatch: return "ExtractorMismatch";
    case ErrorCode::kMissingModels: return "MissingModels";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kInvalidCounts: return "InvalidCounts";
    case ErrorCode::kInsufficientMargin: return "InsufficientMargin";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace lcd
