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

namespace lcd::simd {
namespace {

double DotScalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void AccumulateScalar(const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void AxpyScalar(double w, const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += w * x[i];
}

void AccumulateSqDevScalar(const double* x, const double* mean, double* acc,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean[i];
    acc[i] += d * d;
  }
}

double MahalanobisDiagScalar(const double* x, const double* mean,
                             const double* inv_var, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean[i];
    s += d * d * inv_var[i];
  }
  return s;
}

double SymmetricKlDiagScalar(const double* mean_a, const double* var_a,
                             const double* mean_b, const double* var_b,
                             std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = mean_a[i] - mean_b[i];
    const double ia = 1.0 / var_a[i];
    const double ib = 1.0 / var_b[i];
    s += var_a[i] * ib + var_b[i] * ia - 2.0 + d * d * (ia + ib);
  }
  return 0.5 * s;
}

}  // namespace

const KernelTable& ScalarKernels() {
  static const KernelTable table{
      "scalar",          DotScalar,
      AccumulateScalar,  AxpyScalar,
      AccumulateSqDevScalar, MahalanobisDiagScalar,
      SymmetricKlDiagScalar,
  };
  return table;
}

}  // namespace lcd::simd
