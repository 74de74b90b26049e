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

#include "lcd/backend.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "lcd/error.hpp"
#include "lcd/io_util.hpp"
#include "lcd/rng.hpp"
#include "lcd/simd/kernels.hpp"

namespace lcd {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ClassStats {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> members;
};

ClassStats GroupByLabel(const EmbeddingSet& set) {
  ClassStats cs;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto [it, inserted] = index.emplace(set.labels[i], cs.names.size());
    if (inserted) {
      cs.names.push_back(set.labels[i]);
      cs.members.emplace_back();
    }
    cs.members[it->second].push_back(i);
  }
  return cs;
}

VectorXd ClassMean(const EmbeddingSet& set, const std::vector<std::size_t>& idx) {
  VectorXd m = VectorXd::Zero(static_cast<Eigen::Index>(set.dim()));
  for (std::size_t i : idx) m += set.vectors.row(static_cast<Eigen::Index>(i)).transpose();
  return m / static_cast<double>(idx.size());
}

double LogDetSpd(const MatrixXd& a) {
  Eigen::LLT<MatrixXd> llt(a);
  Require(llt.info() == Eigen::Success, ErrorCode::kSingularCovariance,
          "covariance is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Adds max_eig * 1e-12 to the diagonal until the condition number is below 1e12.
MatrixXd Condition(const MatrixXd& a) {
  MatrixXd s = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (hi <= 0.0) Fail(ErrorCode::kSingularCovariance, "covariance has no positive eigenvalue");
  if (lo < hi * 1e-12) {
    s.diagonal().array() += hi * 1e-12 - std::min(lo, 0.0);
  }
  return s;
}

}  // namespace

std::string_view EmbeddingSourceName(EmbeddingSource s) {
  switch (s) {
    case EmbeddingSource::kU: return "u";
    case EmbeddingSource::kA: return "a";
    case EmbeddingSource::kIvectorImport: return "ivector-import";
    case EmbeddingSource::kXvectorImport: return "xvector-import";
  }
  return "u";
}

void EmbeddingSet::Validate() const {
  Require(labels.size() == size(), ErrorCode::kLengthMismatch,
          "one label per embedding required");
  Require(vectors.allFinite(), ErrorCode::kFormatError, "non-finite embedding value");
}

MatrixXd TrainLda(const EmbeddingSet& set, int out_dim) {
  set.Validate();
  const ClassStats cs = GroupByLabel(set);
  const auto D = static_cast<int>(set.dim());
  const int C = static_cast<int>(cs.names.size());
  if (out_dim < 1 || out_dim > std::min(D, C - 1)) {
    Fail(ErrorCode::kRankDeficient, "LDA dimension " + std::to_string(out_dim) +
                                        " exceeds min(D, classes - 1) = " +
                                        std::to_string(std::min(D, C - 1)));
  }
  const VectorXd mu = set.vectors.colwise().mean().transpose();
  MatrixXd sb = MatrixXd::Zero(D, D), sw = MatrixXd::Zero(D, D);
  for (const auto& idx : cs.members) {
    const VectorXd mc = ClassMean(set, idx);
    sb += static_cast<double>(idx.size()) * (mc - mu) * (mc - mu).transpose();
    for (std::size_t i : idx) {
      const VectorXd d = set.vectors.row(static_cast<Eigen::Index>(i)).transpose() - mc;
      sw += d * d.transpose();
    }
  }
  const double n = static_cast<double>(set.size());
  sb /= n;
  sw /= n;
  sw.diagonal().array() += 1e-6 * sw.trace() / D + 1e-300;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(sb, sw);
  Require(ges.info() == Eigen::Success, ErrorCode::kRankDeficient,
          "LDA eigen decomposition failed");
  MatrixXd w(D, out_dim);
  for (int j = 0; j < out_dim; ++j) w.col(j) = ges.eigenvectors().col(D - 1 - j);
  return w;
}

MatrixXd TrainWccn(const EmbeddingSet& set) {
  set.Validate();
  const ClassStats cs = GroupByLabel(set);
  const auto D = static_cast<Eigen::Index>(set.dim());
  MatrixXd w = MatrixXd::Zero(D, D);
  for (const auto& idx : cs.members) {
    Require(idx.size() >= 2, ErrorCode::kInsufficientVectors,
            "WCCN needs at least two vectors per class");
    const VectorXd mc = ClassMean(set, idx);
    MatrixXd cov = MatrixXd::Zero(D, D);
    for (std::size_t i : idx) {
      const VectorXd d = set.vectors.row(static_cast<Eigen::Index>(i)).transpose() - mc;
      cov += d * d.transpose();
    }
    w += cov / static_cast<double>(idx.size());
  }
  w /= static_cast<double>(cs.members.size());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(w, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff(), lo = es.eigenvalues().minCoeff();
  if (!(hi > 0.0) || lo <= hi * 1e-12) {
    Fail(ErrorCode::kSingularCovariance, "within-class covariance is singular");
  }
  const MatrixXd inv = w.llt().solve(MatrixXd::Identity(D, D));
  Eigen::LLT<MatrixXd> llt(0.5 * (inv + inv.transpose()));
  Require(llt.info() == Eigen::Success, ErrorCode::kSingularCovariance,
          "inverse within-class covariance is not positive definite");
  return llt.matrixL();
}

VectorXd LengthNormalize(const VectorXd& v) {
  const double n = v.norm();
  if (!(n > 0.0)) Fail(ErrorCode::kZeroVector, "cannot length-normalise a zero vector");
  return v / n;
}

double CosineDistance(std::span<const double> u, std::span<const double> v) {
  Require(u.size() == v.size(), ErrorCode::kDimMismatch, "cosine of vectors of different size");
  const auto& k = simd::Active();
  const double uu = k.dot(u.data(), u.data(), u.size());
  const double vv = k.dot(v.data(), v.data(), v.size());
  if (!(uu > 0.0) || !(vv > 0.0)) Fail(ErrorCode::kZeroVector, "cosine of a zero vector");
  const double c = k.dot(u.data(), v.data(), u.size()) / (std::sqrt(uu) * std::sqrt(vv));
  return 1.0 - std::clamp(c, -1.0, 1.0);
}

double CosineDistance(const VectorXd& u, const VectorXd& v) {
  return CosineDistance(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                        std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

double PldaLogLikelihood(const PldaModel& model, const EmbeddingSet& set) {
  const ClassStats cs = GroupByLabel(set);
  const auto D = static_cast<Eigen::Index>(set.dim());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  Eigen::LLT<MatrixXd> wllt(model.within_cov);
  Require(wllt.info() == Eigen::Success, ErrorCode::kSingularCovariance,
          "PLDA within covariance is not positive definite");
  const double logdet_w = 2.0 * wllt.matrixLLT().diagonal().array().log().sum();
  double total = 0.0;
  for (const auto& idx : cs.members) {
    const double n = static_cast<double>(idx.size());
    const VectorXd mean = ClassMean(set, idx) - model.mu;
    const MatrixXd tot = model.within_cov + n * model.between_cov;
    Eigen::LLT<MatrixXd> tllt(tot);
    double quad = n * mean.dot(tllt.solve(mean));
    const VectorXd cm = mean + model.mu;
    for (std::size_t i : idx) {
      const VectorXd d = set.vectors.row(static_cast<Eigen::Index>(i)).transpose() - cm;
      quad += d.dot(wllt.solve(d));
    }
    total += -0.5 * (n * static_cast<double>(D) * log2pi + (n - 1.0) * logdet_w +
                     LogDetSpd(tot) + quad);
  }
  return total / static_cast<double>(set.size());
}

PldaTrainResult TrainPlda(const EmbeddingSet& set, int n_iters) {
  set.Validate();
  const ClassStats cs = GroupByLabel(set);
  if (cs.names.size() < 2) {
    Fail(ErrorCode::kInsufficientClasses, "PLDA needs at least two classes");
  }
  for (const auto& idx : cs.members) {
    Require(idx.size() >= 2, ErrorCode::kInsufficientClasses,
            "PLDA needs at least two vectors per class");
  }
  const auto D = static_cast<Eigen::Index>(set.dim());
  const double N = static_cast<double>(set.size());
  const double C = static_cast<double>(cs.names.size());

  PldaTrainResult res;
  PldaModel& m = res.model;
  m.mu = set.vectors.colwise().mean().transpose();

  // Per-class sufficient statistics of the centred data.
  std::vector<VectorXd> sums;
  std::vector<double> counts;
  MatrixXd scatter = MatrixXd::Zero(D, D);
  MatrixXd sb = MatrixXd::Zero(D, D), sw = MatrixXd::Zero(D, D);
  for (const auto& idx : cs.members) {
    VectorXd s = VectorXd::Zero(D);
    for (std::size_t i : idx) {
      const VectorXd x = set.vectors.row(static_cast<Eigen::Index>(i)).transpose() - m.mu;
      s += x;
      scatter += x * x.transpose();
    }
    const double n = static_cast<double>(idx.size());
    const VectorXd mean = s / n;
    sb += mean * mean.transpose();
    for (std::size_t i : idx) {
      const VectorXd d = set.vectors.row(static_cast<Eigen::Index>(i)).transpose() - m.mu - mean;
      sw += d * d.transpose();
    }
    sums.push_back(s);
    counts.push_back(n);
  }
  m.between_cov = sb / C;
  m.within_cov = Condition(sw / N);

  for (int it = 0;; ++it) {
    res.log_likelihood_trace.push_back(PldaLogLikelihood(m, set));
    if (it == n_iters) break;
    MatrixXd b_acc = MatrixXd::Zero(D, D);
    MatrixXd w_acc = scatter;
    for (std::size_t c = 0; c < sums.size(); ++c) {
      const double n = counts[c];
      const VectorXd mean = sums[c] / n;
      // y | class data ~ N(B (B + W/n)^-1 mean, B - B (B + W/n)^-1 B)
      const MatrixXd s = m.between_cov + m.within_cov / n;
      Eigen::LDLT<MatrixXd> ldlt(s);
      const VectorXd y = m.between_cov * ldlt.solve(mean);
      MatrixXd cov = m.between_cov - m.between_cov * ldlt.solve(m.between_cov);
      cov = 0.5 * (cov + cov.transpose());
      const MatrixXd yy = y * y.transpose();
      b_acc += yy + cov;
      w_acc += -sums[c] * y.transpose() - y * sums[c].transpose() + n * (yy + cov);
    }
    m.between_cov = b_acc / C;
    m.between_cov = 0.5 * (m.between_cov + m.between_cov.transpose());
    m.within_cov = Condition(w_acc / N);
  }
  return res;
}

PldaScorer::PldaScorer(const PldaModel& model) : mu_(model.mu) {
  const auto D = static_cast<Eigen::Index>(model.dim());
  const MatrixXd tot = model.between_cov + model.within_cov;
  MatrixXd joint(2 * D, 2 * D);
  joint << tot, model.between_cov, model.between_cov, tot;
  Eigen::LDLT<MatrixXd> jldlt(joint);
  Require(jldlt.info() == Eigen::Success, ErrorCode::kSingularCovariance,
          "PLDA joint covariance is singular");
  const MatrixXd jinv = jldlt.solve(MatrixXd::Identity(2 * D, 2 * D));
  Eigen::LLT<MatrixXd> tllt(tot);
  const MatrixXd tinv = tllt.solve(MatrixXd::Identity(D, D));
  q_ = jinv.topLeftCorner(D, D) - tinv;
  q_ = 0.5 * (q_ + q_.transpose());
  p_ = jinv.topRightCorner(D, D);
  p_ = 0.5 * (p_ + p_.transpose());
  const double logdet_joint = jldlt.vectorD().array().abs().log().sum();
  offset_ = -0.5 * (logdet_joint - 2.0 * LogDetSpd(tot));
}

double PldaScorer::Score(const VectorXd& u, const VectorXd& v) const {
  if (u.size() != mu_.size() || v.size() != mu_.size()) {
    Fail(ErrorCode::kDimMismatch, "PLDA input dimension differs from the model");
  }
  const VectorXd a = u - mu_, b = v - mu_;
  return offset_ - 0.5 * (a.dot(q_ * a) + b.dot(q_ * b)) - a.dot(p_ * b);
}

double PldaScore(const PldaModel& model, const VectorXd& u, const VectorXd& v) {
  return PldaScorer(model).Score(u, v);
}

std::vector<Trial> BuildWlBlTrials(const EmbeddingSet& set, std::size_t n_each,
                                   std::uint64_t seed) {
  set.Validate();
  const std::size_t n = set.size();
  const ClassStats cs = GroupByLabel(set);
  double wl_total = 0.0, bl_total = 0.0;
  for (const auto& idx : cs.members) {
    const double k = static_cast<double>(idx.size());
    wl_total += k * (k - 1.0) / 2.0;
    bl_total += k * (static_cast<double>(n) - k) / 2.0;
  }
  if (wl_total < static_cast<double>(n_each)) {
    Fail(ErrorCode::kInsufficientVectors, "not enough within-class pairs");
  }
  if (bl_total < static_cast<double>(n_each)) {
    Fail(ErrorCode::kInsufficientVectors, "not enough between-class pairs");
  }

  Rng rng(seed);
  std::vector<Trial> out;
  out.reserve(2 * n_each);
  auto draw = [&](bool same, double total) {
    if (total <= 4.0 * static_cast<double>(n_each) + 1000.0) {
      std::vector<Trial> all;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if ((set.labels[i] == set.labels[j]) == same) all.push_back({i, j, same});
        }
      }
      for (std::size_t k = 0; k < n_each; ++k) {
        const std::size_t r = k + static_cast<std::size_t>(rng.Below(all.size() - k));
        std::swap(all[k], all[r]);
        out.push_back(all[k]);
      }
      return;
    }
    std::set<std::pair<std::size_t, std::size_t>> used;
    while (used.size() < n_each) {
      std::size_t i = static_cast<std::size_t>(rng.Below(n));
      std::size_t j = static_cast<std::size_t>(rng.Below(n));
      if (i == j || (set.labels[i] == set.labels[j]) != same) continue;
      if (i > j) std::swap(i, j);
      if (used.emplace(i, j).second) out.push_back({i, j, same});
    }
  };
  draw(true, wl_total);
  draw(false, bl_total);
  return out;
}

double Eer(std::span<const ScoredTrial> trials) {
  std::vector<ScoredTrial> sorted(trials.begin(), trials.end());
  std::size_t n_tar = 0, n_non = 0;
  for (const ScoredTrial& t : sorted) (t.target ? n_tar : n_non) += 1;
  if (n_tar == 0 || n_non == 0) {
    Fail(ErrorCode::kOneClassOnly, "EER needs both target and non-target trials");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredTrial& a, const ScoredTrial& b) { return a.score < b.score; });

  // ROC points (p_fa, p_miss) as the threshold sweeps upward over tie groups.
  std::vector<std::pair<double, double>> pts{{1.0, 0.0}};
  std::size_t miss = 0, fa = n_non;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      if (sorted[j].target) {
        ++miss;
      } else {
        --fa;
      }
      ++j;
    }
    pts.emplace_back(static_cast<double>(fa) / static_cast<double>(n_non),
                     static_cast<double>(miss) / static_cast<double>(n_tar));
    i = j;
  }

  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      const double cross = (a.first - o.first) * (p.second - o.second) -
                           (a.second - o.second) * (p.first - o.first);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }

  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const auto [x1, y1] = hull[i];
    const auto [x2, y2] = hull[i + 1];
    const double g1 = y1 - x1, g2 = y2 - x2;
    if (g1 >= 0.0 && g2 <= 0.0) {
      if (g1 == g2) return 100.0 * x1;
      const double s = g1 / (g1 - g2);
      return 100.0 * (x1 + s * (x2 - x1));
    }
  }
  return 50.0;  // not reached: the hull runs from (0, 1) to (1, 0)
}

const EmbeddingRow* EmbeddingTrack::Find(std::size_t start, std::size_t end) const {
  const auto it = std::lower_bound(rows.begin(), rows.end(), start,
                                   [](const EmbeddingRow& r, std::size_t s) { return r.start < s; });
  for (auto i = it; i != rows.end() && i->start == start; ++i) {
    if (i->end == end) return &*i;
  }
  return nullptr;
}

EmbeddingTrack ImportEmbeddings(const std::filesystem::path& path, std::size_t expected_dim) {
  const auto lines = io::ReadLines(path);
  const std::string name = path.string();
  if (lines.empty() || lines[0].rfind("EMB1 dim=", 0) != 0) {
    Fail(ErrorCode::kFormatError, name + ": missing 'EMB1 dim=<D>' header");
  }
  EmbeddingTrack track;
  track.dim = static_cast<std::size_t>(io::ParseInt(lines[0].substr(9)));
  if (expected_dim != 0 && track.dim != expected_dim) {
    Fail(ErrorCode::kDimMismatch, name + ": dim " + std::to_string(track.dim) +
                                      ", expected " + std::to_string(expected_dim));
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = io::Split(lines[i], '\t');
    if (f.size() != 3) Fail(ErrorCode::kFormatError, name + ": bad row " + std::to_string(i));
    EmbeddingRow row;
    row.start = static_cast<std::size_t>(io::ParseInt(f[0]));
    row.end = static_cast<std::size_t>(io::ParseInt(f[1]));
    if (row.end <= row.start) {
      Fail(ErrorCode::kFormatError, name + ": empty frame range on row " + std::to_string(i));
    }
    for (const std::string& v : io::Split(f[2], ',')) {
      const double x = io::ParseDouble(v);
      if (!std::isfinite(x)) {
        Fail(ErrorCode::kFormatError, name + ": non-finite value on row " + std::to_string(i));
      }
      row.values.push_back(x);
    }
    if (row.values.size() != track.dim) {
      Fail(ErrorCode::kDimMismatch, name + ": row " + std::to_string(i) + " has " +
                                        std::to_string(row.values.size()) + " values");
    }
    track.rows.push_back(std::move(row));
  }
  std::stable_sort(track.rows.begin(), track.rows.end(),
                   [](const EmbeddingRow& a, const EmbeddingRow& b) {
                     return a.start != b.start ? a.start < b.start : a.end < b.end;
                   });
  return track;
}

std::string FormatEmbeddings(const EmbeddingTrack& track) {
  std::string out = "EMB1 dim=" + std::to_string(track.dim) + "\n";
  for (const EmbeddingRow& r : track.rows) {
    out += std::to_string(r.start) + '\t' + std::to_string(r.end) + '\t';
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      if (i) out += ',';
      out += io::Exact(r.values[i]);
    }
    out += '\n';
  }
  return out;
}

void ExportEmbeddings(const EmbeddingTrack& track, const std::filesystem::path& path) {
  io::AtomicWrite(path, FormatEmbeddings(track));
}

namespace {

std::string FormatRows(const MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += io::Digits17(m(r, c));
    }
    out += '\n';
  }
  return out;
}

MatrixXd ParseRows(const std::vector<std::string>& lines, std::size_t& pos, Eigen::Index rows,
                   Eigen::Index cols, const std::string& name) {
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (pos >= lines.size()) Fail(ErrorCode::kFormatError, name + ": truncated matrix");
    std::istringstream ss(lines[pos++]);
    std::string tok;
    Eigen::Index c = 0;
    while (ss >> tok) {
      if (c >= cols) Fail(ErrorCode::kFormatError, name + ": too many columns");
      m(r, c++) = io::ParseDouble(tok);
    }
    if (c != cols) Fail(ErrorCode::kFormatError, name + ": too few columns");
  }
  return m;
}

}  // namespace

void WriteMatrix(std::string_view magic, const MatrixXd& m, const std::filesystem::path& path) {
  io::AtomicWrite(path, std::string(magic) + ' ' + std::to_string(m.rows()) + ' ' +
                            std::to_string(m.cols()) + '\n' + FormatRows(m));
}

MatrixXd ReadMatrix(std::string_view magic, const std::filesystem::path& path) {
  const auto lines = io::ReadLines(path);
  const std::string name = path.string();
  std::istringstream hs(lines.empty() ? std::string() : lines[0]);
  std::string got;
  Eigen::Index rows = 0, cols = 0;
  hs >> got >> rows >> cols;
  if (got != magic || rows <= 0 || cols <= 0) {
    Fail(ErrorCode::kFormatError, name + ": expected '" + std::string(magic) + " R C' header");
  }
  std::size_t pos = 1;
  return ParseRows(lines, pos, rows, cols, name);
}

void WritePlda(const PldaModel& model, const std::filesystem::path& path) {
  std::string out = "PLDA1 " + std::to_string(model.dim()) + "\n";
  out += FormatRows(model.mu.transpose());
  out += FormatRows(model.between_cov);
  out += FormatRows(model.within_cov);
  io::AtomicWrite(path, out);
}

PldaModel ReadPlda(const std::filesystem::path& path) {
  const auto lines = io::ReadLines(path);
  const std::string name = path.string();
  std::istringstream hs(lines.empty() ? std::string() : lines[0]);
  std::string magic;
  Eigen::Index d = 0;
  hs >> magic >> d;
  if (magic != "PLDA1" || d <= 0) Fail(ErrorCode::kFormatError, name + ": bad PLDA1 header");
  std::size_t pos = 1;
  PldaModel m;
  m.mu = ParseRows(lines, pos, 1, d, name).transpose();
  m.between_cov = ParseRows(lines, pos, d, d, name);
  m.within_cov = ParseRows(lines, pos, d, d, name);
  return m;
}

VectorXd Backend::Apply(const VectorXd& v) const {
  VectorXd out = v;
  if (lda) out = lda->transpose() * out;
  if (wccn) out = wccn->transpose() * out;
  if (length_normalize) out = LengthNormalize(out);
  return out;
}

EmbeddingSet Backend::Apply(const EmbeddingSet& set) const {
  EmbeddingSet out;
  out.labels = set.labels;
  out.source = set.source;
  if (set.size() == 0) return out;
  const VectorXd first = Apply(VectorXd(set.vectors.row(0).transpose()));
  out.vectors.resize(set.vectors.rows(), first.size());
  out.vectors.row(0) = first.transpose();
  for (Eigen::Index i = 1; i < set.vectors.rows(); ++i) {
    out.vectors.row(i) = Apply(VectorXd(set.vectors.row(i).transpose())).transpose();
  }
  return out;
}

}  // namespace lcd
