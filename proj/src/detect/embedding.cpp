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

#include "lcd/detect.hpp"
#include "lcd/error.hpp"

namespace lcd {

Eigen::VectorXd StatEmbedding(FrameView rows, const DetectorModels& models) {
  StatVector sv;
  switch (models.extractor) {
    case ExtractorKind::kUVector:
      if (!models.ubm) Fail(ErrorCode::kMissingModels, "u-vector extraction needs a UBM");
      sv = ZerothOrderStats(*models.ubm, rows);
      break;
    case ExtractorKind::kAVector:
      if (models.class_models.empty()) {
        Fail(ErrorCode::kMissingModels, "a-vector extraction needs class models");
      }
      sv = AVector(models.class_models, rows);
      break;
    case ExtractorKind::kImported:
      Fail(ErrorCode::kExtractorMismatch, "imported embeddings are looked up, not extracted");
  }
  return Eigen::Map<const Eigen::VectorXd>(sv.values.data(),
                                           static_cast<Eigen::Index>(sv.values.size()));
}

EmbeddingSet WindowEmbeddings(std::span<const LabeledStream> streams,
                              const DetectorModels& models, std::size_t window) {
  Require(window >= 2, ErrorCode::kInvalidArgument, "embedding window must be at least 2");
  std::vector<Eigen::VectorXd> rows;
  EmbeddingSet set;
  set.source = models.extractor == ExtractorKind::kUVector ? EmbeddingSource::kU
                                                           : EmbeddingSource::kA;
  for (const LabeledStream& s : streams) {
    for (std::size_t b = 0; b + window <= s.voiced.num_frames; b += window) {
      rows.push_back(StatEmbedding(s.voiced.view(b, b + window), models));
      set.labels.push_back(s.label);
    }
  }
  if (rows.empty()) Fail(ErrorCode::kInsufficientVectors, "no complete embedding window");
  set.vectors.resize(static_cast<Eigen::Index>(rows.size()), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    set.vectors.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return set;
}

}  // namespace lcd
