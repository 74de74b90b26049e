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

#include <cmath>

#include "lcd/detect.hpp"
#include "lcd/error.hpp"

namespace lcd {
namespace {

void RequireLength(std::size_t t, int N) {
  if (N < 1 || t < 2 * static_cast<std::size_t>(N)) {
    Fail(ErrorCode::kTooShort, std::to_string(t) + " voiced frames, need at least 2N = " +
                                   std::to_string(2 * N));
  }
}

// Running window sums of per-frame statistic rows (T x K).
class WindowSums {
 public:
  WindowSums(const std::vector<double>& rows, std::size_t k) : rows_(rows), k_(k) {}

  void Sum(std::size_t begin, std::size_t end, std::vector<double>& out) const {
    out.assign(k_, 0.0);
    for (std::size_t t = begin; t < end; ++t) {
      const double* r = rows_.data() + t * k_;
      for (std::size_t j = 0; j < k_; ++j) out[j] += r[j];
    }
  }

 private:
  const std::vector<double>& rows_;
  std::size_t k_;
};

std::vector<double> StackPosteriors(const FeatureMatrix& voiced, std::span<const DiagGmm> models) {
  const std::size_t T = voiced.num_frames;
  std::size_t k = 0;
  for (const DiagGmm& g : models) k += g.num_components;
  std::vector<double> out(T * k);
  std::size_t off = 0;
  for (const DiagGmm& g : models) {
    if (g.dim != voiced.dim) {
      Fail(ErrorCode::kExtractorMismatch, "model dimension " + std::to_string(g.dim) +
                                              " differs from feature dimension " +
                                              std::to_string(voiced.dim));
    }
    const std::vector<double> post = FramePosteriors(g, voiced.view());
    const std::size_t m = g.num_components;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t j = 0; j < m; ++j) out[t * k + off + j] = post[t * m + j];
    }
    off += m;
  }
  return out;
}

}  // namespace

DistanceContour GaussianDistanceContour(const FeatureMatrix& voiced, int N) {
  RequireLength(voiced.num_frames, N);
  const std::size_t n = static_cast<std::size_t>(N);
  const std::size_t positions = voiced.num_frames - 2 * n + 1;
  DistanceContour c;
  c.window = n;
  c.values.resize(positions);
  const FrameView all = voiced.view();
  for (std::size_t p = 0; p < positions; ++p) {
    const std::size_t i = p + n;
    const DiagGaussian left = FitDiagGaussian(all.slice(i - n, i));
    const DiagGaussian right = FitDiagGaussian(all.slice(i, i + n));
    c.values[p] = SymmetricKl(left, right);
  }
  return c;
}

DistanceContour EmbeddingDistanceContour(const FeatureMatrix& voiced,
                                         const DetectorModels& models,
                                         EmbeddingScorer scorer, int N) {
  RequireLength(voiced.num_frames, N);
  const std::size_t n = static_cast<std::size_t>(N);
  const std::size_t positions = voiced.num_frames - 2 * n + 1;

  std::optional<PldaScorer> plda;
  if (scorer == EmbeddingScorer::kNegativePlda) {
    if (!models.plda) Fail(ErrorCode::kMissingModels, "PLDA scoring needs a PLDA model");
    plda.emplace(*models.plda);
  }

  std::vector<double> stats;
  std::size_t k = 0;
  switch (models.extractor) {
    case ExtractorKind::kUVector:
      if (!models.ubm) Fail(ErrorCode::kMissingModels, "u-vector extraction needs a UBM");
      stats = StackPosteriors(voiced, std::span<const DiagGmm>(&*models.ubm, 1));
      k = models.ubm->num_components;
      break;
    case ExtractorKind::kAVector:
      if (models.class_models.empty()) {
        Fail(ErrorCode::kMissingModels, "a-vector extraction needs class models");
      }
      stats = StackPosteriors(voiced, models.class_models);
      for (const DiagGmm& g : models.class_models) k += g.num_components;
      break;
    case ExtractorKind::kImported:
      if (models.track == nullptr) {
        Fail(ErrorCode::kMissingModels, "imported extraction needs an embedding track");
      }
      break;
  }

  const WindowSums sums(stats, k);
  std::vector<double> buf;
  auto embed = [&](std::size_t begin, std::size_t end) -> Eigen::VectorXd {
    if (models.extractor == ExtractorKind::kImported) {
      const EmbeddingRow* row = models.track->Find(begin, end);
      if (row == nullptr) {
        Fail(ErrorCode::kExtractorMismatch, "no imported embedding for voiced rows [" +
                                                std::to_string(begin) + ", " +
                                                std::to_string(end) + ")");
      }
      return models.backend.Apply(
          Eigen::Map<const Eigen::VectorXd>(row->values.data(),
                                            static_cast<Eigen::Index>(row->values.size())));
    }
    sums.Sum(begin, end, buf);
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(buf.data(), static_cast<Eigen::Index>(k));
    v /= static_cast<double>(end - begin);
    return models.backend.Apply(v);
  };

  DistanceContour c;
  c.window = n;
  c.values.resize(positions);
  for (std::size_t p = 0; p < positions; ++p) {
    const std::size_t i = p + n;
    const Eigen::VectorXd left = embed(i - n, i);
    const Eigen::VectorXd right = embed(i, i + n);
    c.values[p] = plda ? -plda->Score(left, right) : CosineDistance(left, right);
  }
  return c;
}

}  // namespace lcd
