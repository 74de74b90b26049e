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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace lcd {

enum class EmbeddingSource { kU, kA, kIvectorImport, kXvectorImport };

std::string_view EmbeddingSourceName(EmbeddingSource s);

// n labelled D-dimensional vectors (one per row).
struct EmbeddingSet {
  Eigen::MatrixXd vectors;
  std::vector<std::string> labels;
  EmbeddingSource source = EmbeddingSource::kU;

  std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  void Validate() const;
};

// D x out_dim projection; apply as W^T x. Columns are the leading generalised
// eigenvectors of (between, within) scatter.
Eigen::MatrixXd TrainLda(const EmbeddingSet& set, int out_dim);

// B with B B^T = W^-1 for the average within-class covariance W; apply as
// B^T x so the transformed within-class covariance is the identity.
Eigen::MatrixXd TrainWccn(const EmbeddingSet& set);

Eigen::VectorXd LengthNormalize(const Eigen::VectorXd& v);

// 1 - cos(u, v), in [0, 2].
double CosineDistance(std::span<const double> u, std::span<const double> v);
double CosineDistance(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Two-covariance PLDA: x = mu + y + e, y ~ N(0, between), e ~ N(0, within).
struct PldaModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd between_cov;
  Eigen::MatrixXd within_cov;

  std::size_t dim() const { return static_cast<std::size_t>(mu.size()); }
};

struct PldaTrainResult {
  PldaModel model;
  // Mean per-vector marginal log-likelihood, initial model first.
  std::vector<double> log_likelihood_trace;
};

// EM on the vectors as given; callers length-normalise first when the
// pipeline asks for it.
PldaTrainResult TrainPlda(const EmbeddingSet& set, int n_iters = 10);

double PldaLogLikelihood(const PldaModel& model, const EmbeddingSet& set);

// Same-class versus different-class log-likelihood ratio, with the matrices
// needed per pair precomputed.
class PldaScorer {
 public:
  explicit PldaScorer(const PldaModel& model);
  double Score(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  std::size_t dim() const { return static_cast<std::size_t>(mu_.size()); }

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd p_;
  double offset_ = 0.0;
};

double PldaScore(const PldaModel& model, const Eigen::VectorXd& u,
                 const Eigen::VectorXd& v);

struct Trial {
  std::size_t a = 0;
  std::size_t b = 0;
  bool same_class = false;
};

// Exactly n_each within-class and n_each between-class pairs, distinct and
// without self-pairs, drawn uniformly from all such pairs.
std::vector<Trial> BuildWlBlTrials(const EmbeddingSet& set, std::size_t n_each,
                                   std::uint64_t seed);

struct ScoredTrial {
  double score = 0.0;  // higher means more likely target
  bool target = false;
};

// Equal error rate in percent, read off the ROC convex hull where the miss
// and false-alarm rates cross (linear interpolation between hull vertices).
double Eer(std::span<const ScoredTrial> trials);

// Per-utterance track of externally computed embeddings, each covering
// voiced rows [start, end).
struct EmbeddingRow {
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<double> values;
};

struct EmbeddingTrack {
  std::size_t dim = 0;
  std::vector<EmbeddingRow> rows;

  // Row covering exactly [start, end), or nullptr.
  const EmbeddingRow* Find(std::size_t start, std::size_t end) const;
};

// "EMB1 dim=<D>" header, then "start<TAB>end<TAB>v1,...,vD" rows.
EmbeddingTrack ImportEmbeddings(const std::filesystem::path& path,
                                std::size_t expected_dim);
std::string FormatEmbeddings(const EmbeddingTrack& track);
void ExportEmbeddings(const EmbeddingTrack& track, const std::filesystem::path& path);

// Matrix containers ("LDA1 R C" / "WCCN1 R C" and R rows of C values).
void WriteMatrix(std::string_view magic, const Eigen::MatrixXd& m,
                 const std::filesystem::path& path);
Eigen::MatrixXd ReadMatrix(std::string_view magic, const std::filesystem::path& path);

// "PLDA1 D", the mean, D rows of between_cov, D rows of within_cov.
void WritePlda(const PldaModel& model, const std::filesystem::path& path);
PldaModel ReadPlda(const std::filesystem::path& path);

// Optional vector transforms applied before scoring, in this order:
// LDA projection, WCCN, length normalisation.
struct Backend {
  std::optional<Eigen::MatrixXd> lda;
  std::optional<Eigen::MatrixXd> wccn;
  bool length_normalize = false;

  Eigen::VectorXd Apply(const Eigen::VectorXd& v) const;
  EmbeddingSet Apply(const EmbeddingSet& set) const;
};

}  // namespace lcd
