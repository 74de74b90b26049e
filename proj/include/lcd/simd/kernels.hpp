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

// Data-parallel inner loops shared by the feature, Gaussian and scoring code.
// Every kernel has a scalar reference implementation; vectorised variants are
// picked once at startup from what the CPU reports. Set LCD_SIMD=scalar in the
// environment to force the reference path.

#include <cstddef>
#include <string_view>

namespace lcd::simd {

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // acc[i] += x[i]
  void (*accumulate)(const double* x, double* acc, std::size_t n);

  // acc[i] += w * x[i]
  void (*axpy)(double w, const double* x, double* acc, std::size_t n);

  // acc[i] += (x[i] - mean[i])^2
  void (*accumulate_sq_dev)(const double* x, const double* mean, double* acc,
                            std::size_t n);

  // sum_i (x[i] - mean[i])^2 * inv_var[i]
  double (*mahalanobis_diag)(const double* x, const double* mean,
                             const double* inv_var, std::size_t n);

  // Symmetric KL divergence between two diagonal Gaussians. The log-determinant
  // terms cancel, leaving
  //   0.5 * sum_i [va/vb + vb/va - 2 + (ma - mb)^2 (1/va + 1/vb)].
  double (*symmetric_kl_diag)(const double* mean_a, const double* var_a,
                              const double* mean_b, const double* var_b,
                              std::size_t n);
};

const KernelTable& ScalarKernels();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* Avx2Kernels();
const KernelTable* NeonKernels();

// The table used by the rest of the library.
const KernelTable& Active();

}  // namespace lcd::simd
