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

// Acceptance checks. Each criterion prints one PASS or FAIL line with the
// measured values; the exit status is non-zero if any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lcd/backend.hpp"
#include "lcd/cli.hpp"
#include "lcd/detect.hpp"
#include "lcd/evaluation.hpp"
#include "lcd/gaussian.hpp"
#include "lcd/io_util.hpp"
#include "lcd/rng.hpp"
#include "support/synth.hpp"

namespace {

using namespace lcd;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// One-way KL(a||b) for diagonal Gaussians, accumulated in long double.
long double KlOneWay(const DiagGaussian& a, const DiagGaussian& b) {
  long double s = 0.0L;
  for (std::size_t d = 0; d < a.dim(); ++d) {
    const long double va = a.var[d], vb = b.var[d];
    const long double dm = static_cast<long double>(a.mean[d]) - b.mean[d];
    s += va / vb + dm * dm / vb - 1.0L + std::log(vb / va);
  }
  return 0.5L * s;
}

DiagGaussian RandomGaussian(Rng& rng, std::size_t dim) {
  DiagGaussian g;
  for (std::size_t d = 0; d < dim; ++d) {
    g.mean.push_back(rng.Normal(0.0, 3.0));
    g.var.push_back(std::exp(rng.Uniform(-3.0, 3.0)));
  }
  return g;
}

Verdict KlCorrectness() {
  Rng rng(101);
  double worst = 0.0;
  bool identity_zero = true;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t dim = 1 + rng.Below(40);
    const DiagGaussian a = RandomGaussian(rng, dim), b = RandomGaussian(rng, dim);
    const long double ref = KlOneWay(a, b) + KlOneWay(b, a);
    const double got = SymmetricKl(a, b);
    worst = std::max(worst, static_cast<double>(std::abs(got - ref) / ref));
    identity_zero = identity_zero && SymmetricKl(a, a) == 0.0;
  }
  return {worst <= 1e-9 && identity_zero,
          Fmt("max rel err %.3g, identity pairs exactly 0: %s", worst, identity_zero ? "yes" : "no")};
}

FeatureMatrix MixtureData(std::size_t rows, std::size_t dim, int clusters, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> centres(clusters);
  for (auto& c : centres) {
    for (std::size_t d = 0; d < dim; ++d) c.push_back(rng.Normal(0.0, 4.0));
  }
  FeatureMatrix m(rows, dim, FeatureKind::kGeneric);
  for (std::size_t t = 0; t < rows; ++t) {
    const auto& c = centres[rng.Below(clusters)];
    for (std::size_t d = 0; d < dim; ++d) m.at(t, d) = c[d] + rng.Normal(0.0, 0.5 + 0.1 * d);
  }
  return m;
}

Verdict EmMonotonicity() {
  double worst = 0.0;
  int runs = 0;
  for (std::size_t M : {2, 8, 32}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const FeatureMatrix x = MixtureData(2000, 13, 6, 200 + s);
      GmmTrainOptions o;
      o.num_components = M;
      o.num_iters = 20;
      o.seed = s;
      const auto tr = TrainGmm(x.view(), o).log_likelihood_trace;
      for (std::size_t i = 1; i < tr.size(); ++i) worst = std::min(worst, tr[i] - tr[i - 1]);
      ++runs;
    }
  }
  return {worst >= -1e-8, Fmt("%d runs, most negative step %.3g", runs, worst)};
}

Verdict Simplex() {
  Rng rng(303);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t M = 1 + rng.Below(32), D = 1 + rng.Below(20);
    DiagGmm g;
    g.num_components = M;
    g.dim = D;
    double total = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      g.weights.push_back(rng.Uniform(0.01, 1.0));
      total += g.weights.back();
      for (std::size_t d = 0; d < D; ++d) {
        g.means.push_back(rng.Normal(0.0, 2.0));
        g.vars.push_back(std::exp(rng.Uniform(-1.0, 1.0)));
      }
    }
    for (double& w : g.weights) w /= total;
    FeatureMatrix x(5 + rng.Below(200), D, FeatureKind::kGeneric);
    for (double& v : x.data) v = rng.Normal(0.0, 3.0);
    double s = 0.0;
    for (double v : ZerothOrderStats(g, x.view()).values) s += v;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  DiagGmm one;
  one.num_components = 1;
  one.dim = 2;
  one.weights = {1.0};
  one.means = {0.0, 0.0};
  one.vars = {1.0, 1.0};
  FeatureMatrix x(10, 2, FeatureKind::kGeneric);
  for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] = 0.3 * static_cast<double>(i);
  const bool single = ZerothOrderStats(one, x.view()).values == std::vector<double>{1.0};
  return {worst <= 1e-9 && single,
          Fmt("max |sum - 1| %.3g, M=1 gives [1.0]: %s", worst, single ? "yes" : "no")};
}

EvalReport DetectCorpus(const std::vector<testing::GaussianStream>& corpus, const DetectorConfig& cfg,
                        const DetectorModels* models, double collar_sec) {
  std::vector<UttDetections> utts;
  for (const auto& gs : corpus) {
    utts.push_back({"", ChangePointSet::FromTimes(gs.change_times),
                    DetectInFeatures(gs.features, cfg, models).changes});
  }
  EvalConfig ec;
  ec.collar_sec = collar_sec;
  return ScoreCorpus(utts, ec);
}

constexpr double kHop = 0.010;

Verdict UnsupervisedDetection() {
  std::vector<testing::GaussianStream> corpus;
  for (std::uint64_t u = 0; u < 200; ++u) {
    corpus.push_back(testing::RandomGaussianStream(1, 3, 300, 600, 13, 2.0, 4000 + u));
  }
  const DetectorConfig cfg = DetectorConfig::Unsupervised();
  const EvalReport r = DetectCorpus(corpus, cfg, nullptr, 50 * kHop);
  const double dm_frames = r.dm_sec / kHop;
  return {r.idr >= 95.0 && r.far <= 5.0 && dm_frames <= 20.0,
          Fmt("IDR %.2f FAR %.2f MDR %.2f Dm %.2f frames over %zu references", r.idr, r.far,
              r.mdr, dm_frames, r.counts.n_ref)};
}

// The weak-separation corpus shared by the window-length and model-based
// checks.
std::vector<testing::GaussianStream> WeakCorpus() {
  std::vector<testing::GaussianStream> corpus;
  for (std::uint64_t u = 0; u < 100; ++u) {
    corpus.push_back(testing::RandomGaussianStream(1, 3, 300, 600, 13, 0.5, 5000 + u));
  }
  return corpus;
}

Verdict WindowLengthEffect(const std::vector<testing::GaussianStream>& corpus) {
  // The study looks at one change per utterance: the first two segments.
  std::vector<StudyUtterance> utts;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& gs = corpus[k];
    const std::size_t end =
        gs.change_rows.size() > 1 ? gs.change_rows[1] : gs.features.num_frames;
    FeatureMatrix head(end, gs.features.dim, FeatureKind::kGeneric);
    std::copy_n(gs.features.data.begin(), end * gs.features.dim, head.data.begin());
    utts.push_back({"w" + std::to_string(k), std::move(head), gs.change_rows[0]});
  }
  std::vector<std::size_t> xs;
  for (std::size_t x : kStudyWindowSizes) {
    if (x <= 150) xs.push_back(x);
  }
  const auto results = DiscriminationSweep(utts, xs, 77);
  std::vector<double> f;
  for (const auto& r : results) f.push_back(r.anova.f);
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  const double range = *hi - *lo;
  int inversions = 0;
  bool small = true;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f[i] <= f[i - 1]) {
      ++inversions;
      small = small && (f[i - 1] - f[i]) <= 0.05 * range;
    }
  }
  std::string series;
  for (std::size_t i = 0; i < f.size(); ++i) series += Fmt("%s%zu:%.1f", i ? " " : "", xs[i], f[i]);
  return {inversions <= 1 && small && f.back() > f.front(),
          Fmt("F by x {%s}, inversions %d", series.c_str(), inversions)};
}

Verdict ModelBasedGain(const std::vector<testing::GaussianStream>& corpus) {
  const FeatureMatrix a = testing::ClassRows(0, 4000, 13, 0.5, 6001);
  const FeatureMatrix b = testing::ClassRows(1, 4000, 13, 0.5, 6002);
  FeatureMatrix pooled(8000, 13, FeatureKind::kGeneric);
  std::copy(a.data.begin(), a.data.end(), pooled.data.begin());
  std::copy(b.data.begin(), b.data.end(), pooled.data.begin() + a.data.size());
  GmmTrainOptions o;
  o.num_components = 8;
  o.seed = 3;
  const DiagGmm ubm = TrainGmm(pooled.view(), o).model;
  DetectorModels models;
  models.extractor = ExtractorKind::kAVector;
  models.class_models = {MapAdapt(ubm, a.view()), MapAdapt(ubm, b.view())};

  const int N = 20;
  const double collar = 20 * kHop;
  double best_kl = 0.0, best_emb = 0.0, alpha_kl = 0.0, alpha_emb = 0.0;
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    DetectorConfig cfg;
    cfg.N = N;
    cfg.alpha = alpha;
    const double kl = DetectCorpus(corpus, cfg, nullptr, collar).idr;
    cfg.mode = DetectMode::kEmbeddingCosine;
    const double emb = DetectCorpus(corpus, cfg, &models, collar).idr;
    if (kl > best_kl) std::tie(best_kl, alpha_kl) = std::pair(kl, alpha);
    if (emb > best_emb) std::tie(best_emb, alpha_emb) = std::pair(emb, alpha);
  }
  return {best_emb > best_kl,
          Fmt("N=%d collar %.2f s: best gaussian-kl IDR %.2f (alpha %.1f), best a-vector "
              "cosine IDR %.2f (alpha %.1f)",
              N, collar, best_kl, alpha_kl, best_emb, alpha_emb)};
}

Verdict Trichotomy() {
  Rng rng(707);
  double worst_sum = 0.0;
  bool dm_ok = true;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> refs, hyps;
    const auto nr = 1 + rng.Below(8), nh = rng.Below(12);
    for (std::uint64_t i = 0; i < nr; ++i) refs.push_back(rng.Uniform(0.0, 60.0));
    for (std::uint64_t i = 0; i < nh; ++i) hyps.push_back(rng.Uniform(0.0, 60.0));
    EvalConfig cfg;
    cfg.collar_sec = rng.Uniform(0.05, 5.0);
    const EvalReport r =
        ScoreDetection(ChangePointSet::FromTimes(refs), ChangePointSet::FromTimes(hyps), cfg);
    worst_sum = std::max(worst_sum, std::abs(r.idr + r.far + r.mdr - 100.0));
    dm_ok = dm_ok && r.dm_sec <= cfg.collar_sec;
  }
  return {worst_sum <= 1e-9 && dm_ok,
          Fmt("max |IDR+FAR+MDR-100| %.3g, Dm within collar: %s", worst_sum, dm_ok ? "yes" : "no")};
}

Verdict AnovaOracle() {
  const std::vector<std::vector<double>> g{{1, 2, 3}, {2, 3, 4}};
  const AnovaResult r = AnovaF(g);
  return {std::abs(r.f - 1.5) <= 1e-12 && r.df1 == 1 && r.df2 == 4,
          Fmt("F %.15g df (%zu, %zu)", r.f, r.df1, r.df2)};
}

Verdict EerSanity() {
  std::vector<ScoredTrial> sep;
  for (int i = 0; i < 100; ++i) sep.push_back({10.0 + i, true});
  for (int i = 0; i < 100; ++i) sep.push_back({-1.0 - i, false});
  const double e_sep = Eer(sep);

  double worst_shuffle = 0.0;
  double worst_transform = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(900 + s);
    std::vector<ScoredTrial> t;
    for (int i = 0; i < 4000; ++i) t.push_back({rng.Normal(i < 2000 ? 1.5 : 0.0, 1.0), i < 2000});
    std::vector<bool> labels;
    for (const auto& x : t) labels.push_back(x.target);
    for (std::size_t i = labels.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.Below(i));
      const bool tmp = labels[i - 1];
      labels[i - 1] = labels[j];
      labels[j] = tmp;
    }
    auto shuffled = t;
    for (std::size_t i = 0; i < t.size(); ++i) shuffled[i].target = labels[i];
    worst_shuffle = std::max(worst_shuffle, std::abs(Eer(shuffled) - 50.0));
    auto moved = t;
    for (auto& x : moved) x.score = std::atan(3.0 * x.score) + 2.0;
    worst_transform = std::max(worst_transform, std::abs(Eer(moved) - Eer(t)));
  }
  return {e_sep == 0.0 && worst_shuffle <= 3.0 && worst_transform <= 1e-9,
          Fmt("separated %.3g, shuffled max |EER-50| %.2f over 10 seeds, transform drift %.3g",
              e_sep, worst_shuffle, worst_transform)};
}

int Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  if (code != 0) std::fprintf(stderr, "lcd failed (%d): %s\n", code, err.str().c_str());
  return code;
}

Verdict Determinism() {
  const fs::path root = fs::temp_directory_path() / "lcd_acceptance_determinism";
  fs::remove_all(root);
  testing::WriteClassPools(root / "pools", 4, 4.0, 31);
  auto run_once = [&]() -> std::vector<std::string> {
    const fs::path w = root / "run";
    fs::remove_all(w);
    const std::string W = w.string();
    if (Cli({"--seed", "7", "--out", W + "/corpus", "synthesize", "--pools",
             (root / "pools").string(), "--count", "6", "--min-changes", "1",
             "--max-changes", "3"}) != 0 ||
        Cli({"--seed", "7", "--out", W + "/models", "train", "--manifest",
             W + "/corpus/manifest.tsv", "--annotations", W + "/corpus/annotations.tsv",
             "--components", "8"}) != 0 ||
        Cli({"--seed", "7", "--out", W + "/det", "detect", "--manifest",
             W + "/corpus/manifest.tsv", "--mode", "embedding-cosine", "--models",
             W + "/models", "--N", "100", "--alpha", "1"}) != 0 ||
        Cli({"--seed", "7", "--out", W + "/eval", "evaluate", "--annotations",
             W + "/corpus/annotations.tsv", "--detections", W + "/det/detections.tsv"}) != 0) {
      return {};
    }
    return {io::ReadFile(w / "eval/report.txt"), io::ReadFile(w / "eval/report.csv"),
            io::ReadFile(w / "det/detections.tsv"), io::ReadFile(w / "models/models.gmm")};
  };
  const auto first = run_once();
  const auto second = run_once();
  fs::remove_all(root);
  const bool ran = !first.empty() && !second.empty();
  return {ran && first == second,
          ran ? Fmt("report.txt, report.csv, detections and models identical: %s",
                    first == second ? "yes" : "no")
              : std::string("pipeline did not complete")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_sec;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  std::vector<testing::GaussianStream> weak;
  const std::vector<Criterion> criteria{
      {1, "KL correctness", 1.0, KlCorrectness},
      {2, "EM monotonicity", 30.0, EmMonotonicity},
      {3, "zeroth-order simplex", 1.0, Simplex},
      {4, "unsupervised detection", 120.0, UnsupervisedDetection},
      {5, "window-length effect", 120.0,
       [&] {
         weak = WeakCorpus();
         return WindowLengthEffect(weak);
       }},
      {6, "model-based gain", 300.0, [&] { return ModelBasedGain(weak); }},
      {7, "metric trichotomy", 10.0, Trichotomy},
      {8, "ANOVA oracle", 1.0, AnovaOracle},
      {9, "EER sanity", 10.0, EerSanity},
      {10, "determinism", 300.0, Determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = v.pass && sec <= c.budget_sec;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.2f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", c.id,
                c.name, v.detail.c_str(), sec, c.budget_sec);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
