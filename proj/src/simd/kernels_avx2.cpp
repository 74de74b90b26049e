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

#if defined(LCD_HAVE_AVX2)

#include <immintrin.h>

namespace lcd::simd {
namespace {

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double DotAvx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void AccumulateAvx2(const double* x, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i),
                                            _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

void AxpyAvx2(double w, const double* x, double* acc, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(vw, _mm256_loadu_pd(x + i),
                                              _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) acc[i] += w * x[i];
}

void AccumulateSqDevAvx2(const double* x, const double* mean, double* acc,
                         std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(d, d, _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) {
    const double d = x[i] - mean[i];
    acc[i] += d * d;
  }
}

double MahalanobisDiagAvx2(const double* x, const double* mean,
                           const double* inv_var, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(d, d), _mm256_loadu_pd(inv_var + i),
                          acc);
  }
  double s = HorizontalSum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - mean[i];
    s += d * d * inv_var[i];
  }
  return s;
}

double SymmetricKlDiagAvx2(const double* mean_a, const double* var_a,
                           const double* mean_b, const double* var_b,
                           std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(var_a + i);
    const __m256d vb = _mm256_loadu_pd(var_b + i);
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(mean_a + i), _mm256_loadu_pd(mean_b + i));
    const __m256d ia = _mm256_div_pd(one, va);
    const __m256d ib = _mm256_div_pd(one, vb);
    // Both ratios rounded the same way so swapping the arguments is exact.
    __m256d t = _mm256_add_pd(_mm256_mul_pd(va, ib), _mm256_mul_pd(vb, ia));
    t = _mm256_sub_pd(t, two);
    t = _mm256_fmadd_pd(_mm256_mul_pd(d, d), _mm256_add_pd(ia, ib), t);
    acc = _mm256_add_pd(acc, t);
  }
  double s = HorizontalSum(acc);
  for (; i < n; ++i) {
    const double d = mean_a[i] - mean_b[i];
    const double ia = 1.0 / var_a[i];
    const double ib = 1.0 / var_b[i];
    s += var_a[i] * ib + var_b[i] * ia - 2.0 + d * d * (ia + ib);
  }
  return 0.5 * s;
}

}  // namespace

const KernelTable* Avx2Kernels() {
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  static const KernelTable table{
      "avx2",         DotAvx2,
      AccumulateAvx2, AxpyAvx2,
      AccumulateSqDevAvx2, MahalanobisDiagAvx2,
      SymmetricKlDiagAvx2,
  };
  return supported ? &table : nullptr;
}

}  // namespace lcd::simd

#else

namespace lcd::simd {
const KernelTable* Avx2Kernels() { return nullptr; }
}  // namespace lcd::simd

#endif
