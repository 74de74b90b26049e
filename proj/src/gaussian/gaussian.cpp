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

#include "lcd/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "lcd/error.hpp"
#include "lcd/io_util.hpp"
#include "lcd/rng.hpp"
#include "lcd/simd/kernels.hpp"

namespace lcd {

DiagGaussian FitDiagGaussian(FrameView x, double var_floor) {
  if (x.rows < 2) {
    Fail(ErrorCode::kTooFewFrames, "Gaussian fit needs at least 2 frames");
  }
  const auto& k = simd::Active();
  DiagGaussian g;
  g.mean.assign(x.dim, 0.0);
  g.var.assign(x.dim, 0.0);
  for (std::size_t t = 0; t < x.rows; ++t) k.accumulate(x.row_ptr(t), g.mean.data(), x.dim);
  const double inv_n = 1.0 / static_cast<double>(x.rows);
  for (double& m : g.mean) m *= inv_n;
  for (std::size_t t = 0; t < x.rows; ++t) {
    k.accumulate_sq_dev(x.row_ptr(t), g.mean.data(), g.var.data(), x.dim);
  }
  for (double& v : g.var) v = std::max(v * inv_n, var_floor);
  return g;
}

double SymmetricKl(const DiagGaussian& a, const DiagGaussian& b) {
  if (a.dim() != b.dim() || a.var.size() != a.dim() || b.var.size() != b.dim()) {
    Fail(ErrorCode::kDimMismatch, "Gaussian dimensions differ");
  }
  const double d = simd::Active().symmetric_kl_diag(a.mean.data(), a.var.data(),
                                                    b.mean.data(), b.var.data(), a.dim());
  return std::max(d, 0.0);
}

void DiagGmm::Validate() const {
  Require(num_components >= 1, ErrorCode::kInvalidArgument, "GMM needs M >= 1");
  Require(weights.size() == num_components && means.size() == num_components * dim &&
              vars.size() == num_components * dim,
          ErrorCode::kModelShapeMismatch, "GMM parameter sizes disagree with M x D");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  Require(std::abs(sum - 1.0) < 1e-9, ErrorCode::kInvalidArgument,
          "GMM weights must sum to 1");
  for (double w : weights) {
    Require(w >= 0.0 && std::isfinite(w), ErrorCode::kInvalidArgument, "bad GMM weight");
  }
  for (double v : vars) {
    Require(std::isfinite(v) && v > 0.0, ErrorCode::kInvalidArgument,
            "GMM variances must be positive");
  }
  for (double m : means) {
    Require(std::isfinite(m), ErrorCode::kInvalidArgument, "non-finite GMM mean");
  }
}

GmmScorer::GmmScorer(const DiagGmm& gmm)
    : m_(gmm.num_components),
      d_(gmm.dim),
      means_(gmm.means),
      inv_vars_(gmm.vars.size()),
      log_consts_(gmm.num_components) {
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t m = 0; m < m_; ++m) {
    double log_det = 0.0;
    for (std::size_t d = 0; d < d_; ++d) {
      const double v = gmm.vars[m * d_ + d];
      inv_vars_[m * d_ + d] = 1.0 / v;
      log_det += std::log(v);
    }
    const double w = gmm.weights[m];
    log_consts_[m] = w > 0.0 ? std::log(w) - 0.5 * (static_cast<double>(d_) * log2pi + log_det)
                             : -std::numeric_limits<double>::infinity();
  }
}

double GmmScorer::Posteriors(const double* x, double* post) const {
  const auto& k = simd::Active();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < m_; ++m) {
    if (std::isinf(log_consts_[m])) {
      post[m] = log_consts_[m];
      continue;
    }
    post[m] = log_consts_[m] -
              0.5 * k.mahalanobis_diag(x, means_.data() + m * d_, inv_vars_.data() + m * d_, d_);
    best = std::max(best, post[m]);
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < m_; ++m) {
    post[m] = std::isinf(post[m]) ? 0.0 : std::exp(post[m] - best);
    sum += post[m];
  }
  const double inv = 1.0 / sum;
  for (std::size_t m = 0; m < m_; ++m) post[m] *= inv;
  return best + std::log(sum);
}

double MeanLogLikelihood(const DiagGmm& gmm, FrameView x) {
  Require(x.rows >= 1, ErrorCode::kEmptyInput, "no frames to score");
  Require(x.dim == gmm.dim, ErrorCode::kDimMismatch, "feature dim differs from GMM dim");
  const GmmScorer scorer(gmm);
  std::vector<double> post(gmm.num_components);
  double total = 0.0;
  for (std::size_t t = 0; t < x.rows; ++t) total += scorer.Posteriors(x.row_ptr(t), post.data());
  return total / static_cast<double>(x.rows);
}

std::vector<double> FramePosteriors(const DiagGmm& gmm, FrameView x) {
  Require(x.dim == gmm.dim, ErrorCode::kDimMismatch, "feature dim differs from GMM dim");
  const GmmScorer scorer(gmm);
  std::vector<double> post(x.rows * gmm.num_components);
  for (std::size_t t = 0; t < x.rows; ++t) {
    scorer.Posteriors(x.row_ptr(t), post.data() + t * gmm.num_components);
  }
  return post;
}

namespace {

std::vector<double> CanonicalRows(FrameView x) {
  std::vector<std::size_t> order(x.rows);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = x.row(a), rb = x.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  std::vector<double> out;
  out.reserve(x.rows * x.dim);
  for (std::size_t i : order) {
    const auto r = x.row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

double SqDist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

DiagGmm KMeansPlusPlusInit(FrameView x, std::size_t M, std::uint64_t seed,
                           double var_floor) {
  Rng rng(seed);
  const std::size_t n = x.rows, D = x.dim;
  std::vector<std::size_t> centers{static_cast<std::size_t>(rng.Below(n))};
  std::vector<double> best(n);
  for (std::size_t t = 0; t < n; ++t) best[t] = SqDist(x.row_ptr(t), x.row_ptr(centers[0]), D);
  while (centers.size() < M) {
    const double total = std::accumulate(best.begin(), best.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = rng.Uniform() * total;
      pick = n - 1;
      for (std::size_t t = 0; t < n; ++t) {
        u -= best[t];
        if (u < 0.0) {
          pick = t;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.Below(n));
    }
    centers.push_back(pick);
    for (std::size_t t = 0; t < n; ++t) {
      best[t] = std::min(best[t], SqDist(x.row_ptr(t), x.row_ptr(pick), D));
    }
  }

  // One hard assignment pass gives starting weights and variances.
  std::vector<double> count(M, 0.0), sum(M * D, 0.0), sq(M * D, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t arg = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < M; ++m) {
      const double d = SqDist(x.row_ptr(t), x.row_ptr(centers[m]), D);
      if (d < dmin) {
        dmin = d;
        arg = m;
      }
    }
    count[arg] += 1.0;
    for (std::size_t d = 0; d < D; ++d) {
      const double v = x.row_ptr(t)[d];
      sum[arg * D + d] += v;
      sq[arg * D + d] += v * v;
    }
  }
  const DiagGaussian global = FitDiagGaussian(x, var_floor);

  DiagGmm g;
  g.num_components = M;
  g.dim = D;
  g.weights.resize(M);
  g.means.resize(M * D);
  g.vars.resize(M * D);
  for (std::size_t m = 0; m < M; ++m) {
    g.weights[m] = (count[m] + 1.0) / (static_cast<double>(n) + static_cast<double>(M));
    for (std::size_t d = 0; d < D; ++d) {
      if (count[m] >= 2.0) {
        const double mu = sum[m * D + d] / count[m];
        g.means[m * D + d] = mu;
        g.vars[m * D + d] = std::max(sq[m * D + d] / count[m] - mu * mu, var_floor);
      } else {
        g.means[m * D + d] = x.row_ptr(centers[m])[d];
        g.vars[m * D + d] = global.var[d];
      }
    }
  }
  return g;
}

}  // namespace

GmmTrainResult TrainGmm(FrameView input, const GmmTrainOptions& opts) {
  const std::size_t M = opts.num_components;
  Require(M >= 1, ErrorCode::kInvalidArgument, "GMM needs at least one component");
  if (input.rows < 10 * M) {
    Fail(ErrorCode::kTooFewFrames, "EM needs at least 10 frames per component (" +
                                       std::to_string(input.rows) + " < " +
                                       std::to_string(10 * M) + ")");
  }
  const std::vector<double> rows = CanonicalRows(input);
  const FrameView x{rows.data(), input.rows, input.dim};
  const std::size_t n = x.rows, D = x.dim;
  const auto& k = simd::Active();

  GmmTrainResult res;
  res.model = KMeansPlusPlusInit(x, M, opts.seed, opts.var_floor);

  std::vector<double> post(M), occ(M), first(M * D), second(M * D), sqrow(D);
  for (int it = 0;; ++it) {
    const GmmScorer scorer(res.model);
    std::fill(occ.begin(), occ.end(), 0.0);
    std::fill(first.begin(), first.end(), 0.0);
    std::fill(second.begin(), second.end(), 0.0);
    double ll = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double* xt = x.row_ptr(t);
      ll += scorer.Posteriors(xt, post.data());
      for (std::size_t d = 0; d < D; ++d) sqrow[d] = xt[d] * xt[d];
      for (std::size_t m = 0; m < M; ++m) {
        if (post[m] == 0.0) continue;
        occ[m] += post[m];
        k.axpy(post[m], xt, first.data() + m * D, D);
        k.axpy(post[m], sqrow.data(), second.data() + m * D, D);
      }
    }
    res.log_likelihood_trace.push_back(ll / static_cast<double>(n));
    if (it == opts.num_iters) break;

    DiagGmm& g = res.model;
    for (std::size_t m = 0; m < M; ++m) {
      g.weights[m] = occ[m] / static_cast<double>(n);
      if (occ[m] <= 0.0) continue;  // dead component keeps its parameters
      const double inv = 1.0 / occ[m];
      for (std::size_t d = 0; d < D; ++d) {
        const double mu = first[m * D + d] * inv;
        g.means[m * D + d] = mu;
        g.vars[m * D + d] = std::max(second[m * D + d] * inv - mu * mu, opts.var_floor);
      }
    }
    const double wsum = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
    for (double& w : g.weights) w /= wsum;
  }
  return res;
}

DiagGmm MapAdapt(const DiagGmm& ubm, FrameView x, double relevance_factor) {
  Require(x.rows >= 1, ErrorCode::kEmptyInput, "MAP adaptation needs data");
  Require(x.dim == ubm.dim, ErrorCode::kDimMismatch, "feature dim differs from UBM dim");
  Require(relevance_factor >= 0.0, ErrorCode::kInvalidArgument,
          "relevance factor must be non-negative");
  DiagGmm out = ubm;
  if (std::isinf(relevance_factor)) return out;
  const std::size_t M = ubm.num_components, D = ubm.dim;
  const GmmScorer scorer(ubm);
  const auto& k = simd::Active();
  std::vector<double> post(M), occ(M, 0.0), first(M * D, 0.0);
  for (std::size_t t = 0; t < x.rows; ++t) {
    scorer.Posteriors(x.row_ptr(t), post.data());
    for (std::size_t m = 0; m < M; ++m) {
      if (post[m] == 0.0) continue;
      occ[m] += post[m];
      k.axpy(post[m], x.row_ptr(t), first.data() + m * D, D);
    }
  }
  for (std::size_t m = 0; m < M; ++m) {
    const double denom = occ[m] + relevance_factor;
    if (denom <= 0.0) continue;
    for (std::size_t d = 0; d < D; ++d) {
      out.means[m * D + d] =
          (first[m * D + d] + relevance_factor * ubm.means[m * D + d]) / denom;
    }
  }
  return out;
}

StatVector ZerothOrderStats(const DiagGmm& model, FrameView x) {
  if (x.rows == 0) Fail(ErrorCode::kEmptyInput, "zeroth-order stats of an empty window");
  Require(x.dim == model.dim, ErrorCode::kDimMismatch, "feature dim differs from GMM dim");
  const GmmScorer scorer(model);
  StatVector sv;
  sv.kind = StatKind::kU;
  sv.values.assign(model.num_components, 0.0);
  std::vector<double> post(model.num_components);
  for (std::size_t t = 0; t < x.rows; ++t) {
    scorer.Posteriors(x.row_ptr(t), post.data());
    for (std::size_t m = 0; m < post.size(); ++m) sv.values[m] += post[m];
  }
  const double inv = 1.0 / static_cast<double>(x.rows);
  for (double& v : sv.values) v *= inv;
  return sv;
}

StatVector AVector(std::span<const DiagGmm> class_models, FrameView x) {
  Require(!class_models.empty(), ErrorCode::kMissingModels, "no class models");
  for (const DiagGmm& g : class_models) {
    if (g.num_components != class_models[0].num_components || g.dim != class_models[0].dim) {
      Fail(ErrorCode::kModelShapeMismatch, "class models must share M and D");
    }
  }
  StatVector out;
  out.kind = StatKind::kA;
  for (const DiagGmm& g : class_models) {
    const StatVector u = ZerothOrderStats(g, x);
    out.values.insert(out.values.end(), u.values.begin(), u.values.end());
  }
  return out;
}

std::string FormatGmms(std::span<const NamedGmm> models) {
  std::string out;
  auto line = [&out](std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ' ';
      out += io::Digits17(v[i]);
    }
    out += '\n';
  };
  for (const NamedGmm& nm : models) {
    const DiagGmm& g = nm.gmm;
    out += "GMM1 " + std::to_string(g.num_components) + ' ' + std::to_string(g.dim);
    if (!nm.label.empty()) out += " class=" + nm.label;
    out += '\n';
    line(g.weights);
    for (std::size_t m = 0; m < g.num_components; ++m) line(g.mean(m));
    for (std::size_t m = 0; m < g.num_components; ++m) line(g.var(m));
  }
  return out;
}

void WriteGmms(std::span<const NamedGmm> models, const std::filesystem::path& path) {
  io::AtomicWrite(path, FormatGmms(models));
}

std::vector<NamedGmm> ReadGmms(const std::filesystem::path& path) {
  const auto lines = io::ReadLines(path);
  std::vector<NamedGmm> out;
  std::size_t i = 0;
  auto numbers = [&](std::size_t expect) {
    if (i >= lines.size()) Fail(ErrorCode::kFormatError, path.string() + ": truncated GMM");
    std::vector<double> v;
    std::istringstream ss(lines[i++]);
    std::string tok;
    while (ss >> tok) v.push_back(io::ParseDouble(tok));
    if (v.size() != expect) {
      Fail(ErrorCode::kFormatError, path.string() + ": expected " + std::to_string(expect) +
                                        " values on line " + std::to_string(i));
    }
    return v;
  };
  while (i < lines.size()) {
    std::istringstream hs(lines[i++]);
    std::string magic, tok;
    std::size_t M = 0, D = 0;
    hs >> magic >> M >> D;
    if (magic != "GMM1" || M == 0 || D == 0) {
      Fail(ErrorCode::kFormatError, path.string() + ": bad GMM header '" + lines[i - 1] + "'");
    }
    NamedGmm nm;
    while (hs >> tok) {
      if (tok.rfind("class=", 0) == 0) nm.label = tok.substr(6);
    }
    nm.gmm.num_components = M;
    nm.gmm.dim = D;
    nm.gmm.weights = numbers(M);
    for (std::size_t m = 0; m < M; ++m) {
      const auto v = numbers(D);
      nm.gmm.means.insert(nm.gmm.means.end(), v.begin(), v.end());
    }
    for (std::size_t m = 0; m < M; ++m) {
      const auto v = numbers(D);
      nm.gmm.vars.insert(nm.gmm.vars.end(), v.begin(), v.end());
    }
    nm.gmm.Validate();
    out.push_back(std::move(nm));
  }
  return out;
}

}  // namespace lcd
