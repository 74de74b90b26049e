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

#include "lcd/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace lcd::simd {
namespace {

double DotNeon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void AccumulateNeon(const double* x, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(x + i)));
  for (; i < n; ++i) acc[i] += x[i];
}

void AxpyNeon(double w, const double* x, double* acc, std::size_t n) {
  const float64x2_t vw = vdupq_n_f64(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), vw, vld1q_f64(x + i)));
  for (; i < n; ++i) acc[i] += w * x[i];
}

void AccumulateSqDevNeon(const double* x, const double* mean, double* acc,
                         std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(mean + i));
    vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), d, d));
  }
  for (; i < n; ++i) {
    const double d = x[i] - mean[i];
    acc[i] += d * d;
  }
}

double MahalanobisDiagNeon(const double* x, const double* mean,
                           const double* inv_var, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(mean + i));
    acc = vfmaq_f64(acc, vmulq_f64(d, d), vld1q_f64(inv_var + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - mean[i];
    s += d * d * inv_var[i];
  }
  return s;
}

double SymmetricKlDiagNeon(const double* mean_a, const double* var_a,
                           const double* mean_b, const double* var_b,
                           std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t two = vdupq_n_f64(2.0);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(var_a + i);
    const float64x2_t vb = vld1q_f64(var_b + i);
    const float64x2_t d = vsubq_f64(vld1q_f64(mean_a + i), vld1q_f64(mean_b + i));
    const float64x2_t ia = vdivq_f64(one, va);
    const float64x2_t ib = vdivq_f64(one, vb);
    float64x2_t t = vaddq_f64(vmulq_f64(va, ib), vmulq_f64(vb, ia));
    t = vsubq_f64(t, two);
    t = vfmaq_f64(t, vmulq_f64(d, d), vaddq_f64(ia, ib));
    acc = vaddq_f64(acc, t);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = mean_a[i] - mean_b[i];
    const double ia = 1.0 / var_a[i];
    const double ib = 1.0 / var_b[i];
    s += var_a[i] * ib + var_b[i] * ia - 2.0 + d * d * (ia + ib);
  }
  return 0.5 * s;
}

}  // namespace

const KernelTable* NeonKernels() {
  static const KernelTable table{
      "neon",         DotNeon,
      AccumulateNeon, AxpyNeon,
      AccumulateSqDevNeon, MahalanobisDiagNeon,
      SymmetricKlDiagNeon,
  };
  return &table;
}

}  // namespace lcd::simd

#else

namespace lcd::simd {
const KernelTable* NeonKernels() { return nullptr; }
}  // namespace lcd::simd

#endif
