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
#include <span>
#include <string>
#include <vector>

#include "lcd/features.hpp"

namespace lcd {

inline constexpr double kVarFloor = 1e-6;

struct DiagGaussian {
  std::vector<double> mean;
  std::vector<double> var;

  std::size_t dim() const { return mean.size(); }
};

// Sample mean and biased (1/n) variance, floored at var_floor. n >= 2.
DiagGaussian FitDiagGaussian(FrameView x, double var_floor = kVarFloor);

// KL(a||b) + KL(b||a) in closed form for diagonal covariances.
double SymmetricKl(const DiagGaussian& a, const DiagGaussian& b);

// Diagonal-covariance mixture; means and vars are M x D row-major.
struct DiagGmm {
  std::size_t num_components = 0;
  std::size_t dim = 0;
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> vars;

  std::span<const double> mean(std::size_t m) const { return {means.data() + m * dim, dim}; }
  std::span<const double> var(std::size_t m) const { return {vars.data() + m * dim, dim}; }

  void Validate() const;
};

// Precomputed per-component constants for fast frame scoring.
class GmmScorer {
 public:
  explicit GmmScorer(const DiagGmm& gmm);

  // Component posteriors for one frame (written to `post`, M entries, summing
  // to one). Returns log p(x).
  double Posteriors(const double* x, double* post) const;

  std::size_t num_components() const { return m_; }
  std::size_t dim() const { return d_; }

 private:
  std::size_t m_;
  std::size_t d_;
  std::vector<double> means_;
  std::vector<double> inv_vars_;
  std::vector<double> log_consts_;  // log w + gconst, -inf for empty components
};

// Mean per-frame log-likelihood.
double MeanLogLikelihood(const DiagGmm& gmm, FrameView x);

// T x M matrix of frame posteriors.
std::vector<double> FramePosteriors(const DiagGmm& gmm, FrameView x);

struct GmmTrainOptions {
  std::size_t num_components = 32;
  int num_iters = 20;
  std::uint64_t seed = 0;
  double var_floor = kVarFloor;
};

struct GmmTrainResult {
  DiagGmm model;
  // Mean log-likelihood of the training data under the initial model and
  // after each EM iteration (num_iters + 1 entries).
  std::vector<double> log_likelihood_trace;
};

// Seeded k-means++ initialisation followed by EM with variance flooring. Rows
// are put into a canonical order first, so the result does not depend on the
// order of the input rows.
GmmTrainResult TrainGmm(FrameView x, const GmmTrainOptions& opts = {});

// Means-only MAP adaptation: m_i <- (n_i xbar_i + r m_i) / (n_i + r). Weights
// and variances are copied from the UBM. r = +inf returns the UBM unchanged.
DiagGmm MapAdapt(const DiagGmm& ubm, FrameView x, double relevance_factor = 16.0);

enum class StatKind { kU, kA };

struct StatVector {
  std::vector<double> values;
  StatKind kind = StatKind::kU;
};

// Average component posterior over the frames; a point on the simplex.
StatVector ZerothOrderStats(const DiagGmm& model, FrameView x);

// Concatenated zeroth-order statistics under each class model.
StatVector AVector(std::span<const DiagGmm> class_models, FrameView x);

// Text container: "GMM1 M D [class=<label>]", a weights line, M mean lines
// and M variance lines. Several blocks may follow each other in one file.
struct NamedGmm {
  std::string label;  // empty for the UBM
  DiagGmm gmm;
};
std::string FormatGmms(std::span<const NamedGmm> models);
void WriteGmms(std::span<const NamedGmm> models, const std::filesystem::path& path);
std::vector<NamedGmm> ReadGmms(const std::filesystem::path& path);

}  // namespace lcd
