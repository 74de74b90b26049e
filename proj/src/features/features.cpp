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
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "lcd/error.hpp"
#include "lcd/features.hpp"
#include "lcd/io_util.hpp"

namespace lcd {
namespace {

std::mutex& FftwPlannerMutex() {
  static std::mutex mu;
  return mu;
}

// Owns an r2c plan and its buffers. Planning goes through a global lock since
// the FFTW planner is not reentrant; execution on private buffers is.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    {
      std::lock_guard<std::mutex> lock(FftwPlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_; }

  // Magnitudes of bins 0..n/2.
  void Magnitudes(std::vector<double>& mag) {
    fftw_execute(plan_);
    mag.resize(n_ / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) {
      mag[k] = std::hypot(out_[k][0], out_[k][1]);
    }
  }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

std::vector<double> Hamming(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n - 1));
  }
  return w;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// n_mels x (nfft/2 + 1) triangular filters spanning 0..Nyquist.
std::vector<std::vector<double>> MelFilterbank(int n_mels, std::size_t nfft,
                                               int sample_rate) {
  const std::size_t n_bins = nfft / 2 + 1;
  const double mel_hi = HzToMel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_hi * static_cast<double>(i) /
                       static_cast<double>(n_mels + 1));
  }
  std::vector<std::vector<double>> fb(static_cast<std::size_t>(n_mels),
                                      std::vector<double>(n_bins, 0.0));
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], c = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(nfft);
      if (f > lo && f < c) {
        fb[m][k] = (f - lo) / (c - lo);
      } else if (f >= c && f < hi) {
        fb[m][k] = (hi - f) / (hi - c);
      }
    }
  }
  return fb;
}

// Orthonormal DCT-II basis, n_out x n_in.
std::vector<std::vector<double>> DctMatrix(int n_out, int n_in) {
  std::vector<std::vector<double>> m(static_cast<std::size_t>(n_out),
                                     std::vector<double>(n_in));
  for (int k = 0; k < n_out; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n_in) : std::sqrt(2.0 / n_in);
    for (int j = 0; j < n_in; ++j) {
      m[k][j] = scale * std::cos(std::numbers::pi * k * (j + 0.5) / n_in);
    }
  }
  return m;
}

void FillFrameTimes(FeatureMatrix& fm, const FrameLayout& layout, int rate) {
  fm.frame_start_times.resize(layout.num_frames);
  for (std::size_t t = 0; t < layout.num_frames; ++t) {
    fm.frame_start_times[t] =
        static_cast<double>(t * layout.hop) / static_cast<double>(rate);
  }
}

std::size_t Clamp(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return 0;
  if (static_cast<std::size_t>(i) >= n) return n - 1;
  return static_cast<std::size_t>(i);
}

// Regression delta over +-2 frames with replicated edges.
FeatureMatrix Delta(const FeatureMatrix& in) {
  FeatureMatrix out = in;
  const std::size_t T = in.num_frames;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t d = 0; d < in.dim; ++d) {
      double num = 0.0;
      for (int n = 1; n <= 2; ++n) {
        const auto ti = static_cast<std::ptrdiff_t>(t);
        num += n * (in.at(Clamp(ti + n, T), d) - in.at(Clamp(ti - n, T), d));
      }
      out.at(t, d) = num / 10.0;
    }
  }
  return out;
}

}  // namespace

std::string_view FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMfcc13: return "mfcc13";
    case FeatureKind::kMfcc39: return "mfcc39";
    case FeatureKind::kLpcc: return "lpcc";
    case FeatureKind::kSdc: return "sdc";
    case FeatureKind::kGeneric: return "generic";
  }
  return "generic";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  if (name == "mfcc13") return FeatureKind::kMfcc13;
  if (name == "mfcc39") return FeatureKind::kMfcc39;
  if (name == "lpcc") return FeatureKind::kLpcc;
  if (name == "sdc") return FeatureKind::kSdc;
  if (name == "generic") return FeatureKind::kGeneric;
  Fail(ErrorCode::kInvalidArgument, "unknown feature kind '" + std::string(name) + "'");
}

FeatureMatrix::FeatureMatrix(std::size_t frames, std::size_t d, FeatureKind k,
                             double frame_len, double hop)
    : num_frames(frames),
      dim(d),
      data(frames * d, 0.0),
      frame_len_sec(frame_len),
      hop_sec(hop),
      frame_start_times(frames),
      kind(k) {
  for (std::size_t t = 0; t < frames; ++t) {
    frame_start_times[t] = static_cast<double>(t) * hop;
  }
}

void FeatureMatrix::Validate() const {
  Require(num_frames >= 1, ErrorCode::kTooShort, "feature matrix has no frames");
  Require(data.size() == num_frames * dim, ErrorCode::kLengthMismatch,
          "feature data size does not match T x D");
  for (double v : data) {
    Require(std::isfinite(v), ErrorCode::kInvalidArgument, "non-finite feature value");
  }
  if (has_voiced_map()) {
    Require(voiced_index_map.size() == num_frames, ErrorCode::kLengthMismatch,
            "voiced index map must have one entry per row");
    std::size_t count = 0;
    for (auto m : voiced_mask) count += m != 0;
    Require(voiced_mask.empty() || count == voiced_index_map.size(),
            ErrorCode::kLengthMismatch, "voiced mask and index map disagree");
    for (std::size_t i = 1; i < voiced_index_map.size(); ++i) {
      Require(voiced_index_map[i] > voiced_index_map[i - 1],
              ErrorCode::kInvalidArgument, "voiced index map must be increasing");
    }
    Require(voiced_index_map.back() < frame_start_times.size(),
            ErrorCode::kLengthMismatch, "voiced index map exceeds frame times");
  } else {
    Require(frame_start_times.size() == num_frames, ErrorCode::kLengthMismatch,
            "frame_start_times must have one entry per frame");
  }
}

FrameLayout ComputeFrameLayout(std::size_t num_samples, int sample_rate,
                               double frame_len_sec, double hop_sec) {
  FrameLayout layout;
  layout.frame_len = static_cast<std::size_t>(std::lround(frame_len_sec * sample_rate));
  layout.hop = static_cast<std::size_t>(std::lround(hop_sec * sample_rate));
  Require(layout.frame_len > 0 && layout.hop > 0, ErrorCode::kInvalidArgument,
          "frame length and hop must be at least one sample");
  if (num_samples < layout.frame_len) {
    Fail(ErrorCode::kTooShort, std::to_string(num_samples) +
                                   " samples is shorter than one frame");
  }
  layout.num_frames = 1 + (num_samples - layout.frame_len) / layout.hop;
  return layout;
}

std::vector<std::vector<double>> FrameSignal(const AudioBuffer& buf,
                                             double frame_len_sec, double hop_sec) {
  const FrameLayout layout =
      ComputeFrameLayout(buf.size(), buf.sample_rate, frame_len_sec, hop_sec);
  std::vector<std::vector<double>> frames(layout.num_frames);
  for (std::size_t t = 0; t < layout.num_frames; ++t) {
    const auto begin = buf.samples.begin() + static_cast<std::ptrdiff_t>(t * layout.hop);
    frames[t].assign(begin, begin + static_cast<std::ptrdiff_t>(layout.frame_len));
  }
  return frames;
}

FeatureMatrix Mfcc(const AudioBuffer& buf, const MfccOptions& opts) {
  Require(buf.sample_rate >= 8000, ErrorCode::kInvalidArgument,
          "MFCC needs a sample rate of at least 8 kHz");
  Require(opts.n_coeffs >= 1 && opts.n_coeffs <= opts.n_mels,
          ErrorCode::kInvalidArgument, "n_coeffs must be in [1, n_mels]");
  const FrameLayout layout = ComputeFrameLayout(buf.size(), buf.sample_rate,
                                                opts.frame_len_sec, opts.hop_sec);
  std::size_t nfft = 1;
  while (nfft < layout.frame_len) nfft <<= 1;

  const std::vector<double> window = Hamming(layout.frame_len);
  const auto fb = MelFilterbank(opts.n_mels, nfft, buf.sample_rate);
  const auto dct = DctMatrix(opts.n_coeffs, opts.n_mels);

  FeatureMatrix fm(layout.num_frames, static_cast<std::size_t>(opts.n_coeffs),
                   FeatureKind::kMfcc13, opts.frame_len_sec, opts.hop_sec);
  FillFrameTimes(fm, layout, buf.sample_rate);

  RealFft fft(nfft);
  std::vector<double> mag;
  std::vector<double> log_mel(static_cast<std::size_t>(opts.n_mels));
  for (std::size_t t = 0; t < layout.num_frames; ++t) {
    const double* x = buf.samples.data() + t * layout.hop;
    double* in = fft.input();
    in[0] = (x[0] - opts.preemph * x[0]) * window[0];
    for (std::size_t i = 1; i < layout.frame_len; ++i) {
      in[i] = (x[i] - opts.preemph * x[i - 1]) * window[i];
    }
    std::fill(in + layout.frame_len, in + nfft, 0.0);
    fft.Magnitudes(mag);
    for (int m = 0; m < opts.n_mels; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < mag.size(); ++k) e += fb[m][k] * mag[k];
      log_mel[m] = std::log(std::max(e, opts.log_floor));
    }
    for (int c = 0; c < opts.n_coeffs; ++c) {
      double s = 0.0;
      for (int m = 0; m < opts.n_mels; ++m) s += dct[c][m] * log_mel[m];
      fm.at(t, static_cast<std::size_t>(c)) = s;
    }
  }
  return fm;
}

FeatureMatrix AppendDeltas(const FeatureMatrix& base) {
  if (base.num_frames < 5) {
    Fail(ErrorCode::kTooShort, "deltas need at least 5 frames");
  }
  const FeatureMatrix d1 = Delta(base);
  const FeatureMatrix d2 = Delta(d1);
  FeatureMatrix out = base;
  out.dim = base.dim * 3;
  out.data.assign(base.num_frames * out.dim, 0.0);
  out.kind = base.kind == FeatureKind::kMfcc13 ? FeatureKind::kMfcc39 : base.kind;
  for (std::size_t t = 0; t < base.num_frames; ++t) {
    auto dst = out.row(t);
    std::copy_n(base.row(t).begin(), base.dim, dst.begin());
    std::copy_n(d1.row(t).begin(), base.dim, dst.begin() + static_cast<std::ptrdiff_t>(base.dim));
    std::copy_n(d2.row(t).begin(), base.dim,
                dst.begin() + static_cast<std::ptrdiff_t>(2 * base.dim));
  }
  return out;
}

LpcResult LevinsonDurbin(std::span<const double> r, int order) {
  Require(order >= 1 && r.size() > static_cast<std::size_t>(order),
          ErrorCode::kInvalidArgument, "autocorrelation shorter than LPC order");
  Require(r[0] > 0.0, ErrorCode::kInvalidArgument, "r[0] must be positive");
  LpcResult res;
  res.a.assign(static_cast<std::size_t>(order) + 1, 0.0);
  res.a[0] = 1.0;
  double err = r[0];
  std::vector<double> prev(res.a.size());
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += res.a[j] * r[i - j];
    const double k = -acc / err;
    prev = res.a;
    for (int j = 1; j < i; ++j) res.a[j] = prev[j] + k * prev[i - j];
    res.a[i] = k;
    err *= (1.0 - k * k);
  }
  res.error = err;
  return res;
}

std::optional<LpcResult> FrameLpc(std::span<const double> frame, int order) {
  const std::vector<double> w = Hamming(frame.size());
  std::vector<double> xw(frame.size());
  bool all_zero = true;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    xw[i] = frame[i] * w[i];
    all_zero = all_zero && frame[i] == 0.0;
  }
  if (all_zero) return std::nullopt;
  std::vector<double> r(static_cast<std::size_t>(order) + 1, 0.0);
  for (int lag = 0; lag <= order; ++lag) {
    double s = 0.0;
    for (std::size_t i = static_cast<std::size_t>(lag); i < xw.size(); ++i) {
      s += xw[i] * xw[i - static_cast<std::size_t>(lag)];
    }
    r[static_cast<std::size_t>(lag)] = s;
  }
  if (!(r[0] > 0.0)) return std::nullopt;
  r[0] *= 1.0 + 1e-9;
  return LevinsonDurbin(r, order);
}

std::vector<double> LpcToCepstrum(const LpcResult& lpc, int n_coeffs) {
  const int p = static_cast<int>(lpc.a.size()) - 1;
  std::vector<double> c(static_cast<std::size_t>(n_coeffs), 0.0);
  if (n_coeffs == 0) return c;
  c[0] = std::log(std::max(lpc.error, 1e-300));
  for (int n = 1; n < n_coeffs; ++n) {
    double s = n <= p ? -lpc.a[n] : 0.0;
    for (int k = std::max(1, n - p); k < n; ++k) {
      s -= (static_cast<double>(k) / n) * c[k] * lpc.a[n - k];
    }
    c[n] = s;
  }
  return c;
}

LpccResult Lpcc(const AudioBuffer& buf, const LpccOptions& opts) {
  const FrameLayout layout = ComputeFrameLayout(buf.size(), buf.sample_rate,
                                                opts.frame_len_sec, opts.hop_sec);
  LpccResult res;
  res.features = FeatureMatrix(layout.num_frames, static_cast<std::size_t>(opts.n_coeffs),
                               FeatureKind::kLpcc, opts.frame_len_sec, opts.hop_sec);
  FillFrameTimes(res.features, layout, buf.sample_rate);
  res.degenerate.assign(layout.num_frames, 0);
  for (std::size_t t = 0; t < layout.num_frames; ++t) {
    std::span<const double> frame(buf.samples.data() + t * layout.hop, layout.frame_len);
    const auto lpc = FrameLpc(frame, opts.lpc_order);
    if (!lpc) {
      res.degenerate[t] = 1;
      continue;
    }
    const auto c = LpcToCepstrum(*lpc, opts.n_coeffs);
    std::copy(c.begin(), c.end(), res.features.row(t).begin());
  }
  return res;
}

FeatureMatrix Sdc(const FeatureMatrix& base, const SdcOptions& opts) {
  Require(opts.n >= 1 && static_cast<std::size_t>(opts.n) <= base.dim,
          ErrorCode::kDimMismatch, "SDC base needs at least N coefficients");
  const std::size_t span = static_cast<std::size_t>(opts.d + (opts.k - 1) * opts.p + opts.d);
  if (base.num_frames <= span) {
    Fail(ErrorCode::kTooShort, "SDC needs more than d + (k-1)P + d frames");
  }
  FeatureMatrix out = base;
  out.dim = static_cast<std::size_t>(opts.n * opts.k);
  out.data.assign(base.num_frames * out.dim, 0.0);
  out.kind = FeatureKind::kSdc;
  const std::size_t T = base.num_frames;
  for (std::size_t t = 0; t < T; ++t) {
    for (int i = 0; i < opts.k; ++i) {
      const auto centre = static_cast<std::ptrdiff_t>(t) + i * opts.p;
      const std::size_t hi = Clamp(centre + opts.d, T);
      const std::size_t lo = Clamp(centre - opts.d, T);
      for (int j = 0; j < opts.n; ++j) {
        out.at(t, static_cast<std::size_t>(i * opts.n + j)) =
            base.at(hi, static_cast<std::size_t>(j)) - base.at(lo, static_cast<std::size_t>(j));
      }
    }
  }
  return out;
}

FeatureMatrix ExtractFeatures(const AudioBuffer& buf, FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kMfcc13: return Mfcc(buf);
    case FeatureKind::kMfcc39: return AppendDeltas(Mfcc(buf));
    case FeatureKind::kLpcc: return Lpcc(buf).features;
    case FeatureKind::kSdc: return Sdc(Mfcc(buf));
    case FeatureKind::kGeneric: break;
  }
  Fail(ErrorCode::kInvalidArgument, "generic features cannot be extracted from audio");
}

namespace {

void PutU32(std::string& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutBits(std::string& b, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetBits(const std::string& b, std::size_t off, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[off + i])) << (8 * i);
  }
  return v;
}

}  // namespace

void WriteFeatureDump(const FeatureMatrix& fm, const std::filesystem::path& path) {
  std::string b = "FTR1";
  PutU32(b, static_cast<std::uint32_t>(fm.num_frames));
  PutU32(b, static_cast<std::uint32_t>(fm.dim));
  std::uint64_t bits;
  std::memcpy(&bits, &fm.frame_len_sec, 8);
  PutBits(b, bits, 8);
  std::memcpy(&bits, &fm.hop_sec, 8);
  PutBits(b, bits, 8);
  for (double v : fm.data) {
    const float f = static_cast<float>(v);
    std::uint32_t fb;
    std::memcpy(&fb, &f, 4);
    PutU32(b, fb);
  }
  for (std::size_t t = 0; t < fm.num_frames; ++t) {
    const bool voiced = fm.voiced_mask.empty() || fm.voiced_mask[t] != 0;
    b.push_back(voiced ? 1 : 0);
  }
  io::AtomicWrite(path, b);
}

FeatureMatrix ReadFeatureDump(const std::filesystem::path& path) {
  const std::string b = io::ReadFile(path);
  if (b.size() < 28 || b.compare(0, 4, "FTR1") != 0) {
    Fail(ErrorCode::kFormatError, path.string() + ": not an FTR1 feature dump");
  }
  const auto T = static_cast<std::size_t>(GetBits(b, 4, 4));
  const auto D = static_cast<std::size_t>(GetBits(b, 8, 4));
  if (b.size() != 28 + 4 * T * D + T) {
    Fail(ErrorCode::kFormatError, path.string() + ": size does not match header");
  }
  double frame_len, hop;
  std::uint64_t bits = GetBits(b, 12, 8);
  std::memcpy(&frame_len, &bits, 8);
  bits = GetBits(b, 20, 8);
  std::memcpy(&hop, &bits, 8);
  FeatureMatrix fm(T, D, FeatureKind::kGeneric, frame_len, hop);
  for (std::size_t i = 0; i < T * D; ++i) {
    const auto fb = static_cast<std::uint32_t>(GetBits(b, 28 + 4 * i, 4));
    float f;
    std::memcpy(&f, &fb, 4);
    fm.data[i] = f;
  }
  fm.voiced_mask.resize(T);
  for (std::size_t t = 0; t < T; ++t) fm.voiced_mask[t] = b[28 + 4 * T * D + t] ? 1 : 0;
  return fm;
}

}  // namespace lcd
