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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lcd/rng.hpp"
#include "lcd/simd/kernels.hpp"

namespace lcd::simd {
namespace {

std::vector<double> RandomVec(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.Uniform(lo, hi);
  return v;
}

void ExpectClose(double ref, double got) {
  EXPECT_NEAR(ref, got, 1e-12 * std::max(1.0, std::abs(ref)));
}

class KernelEquivalence : public ::testing::TestWithParam<const KernelTable*> {};

TEST_P(KernelEquivalence, MatchesScalarReference) {
  const KernelTable& ref = ScalarKernels();
  const KernelTable& vec = *GetParam();
  Rng rng(42);
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto a = RandomVec(rng, n, -3.0, 3.0);
    const auto b = RandomVec(rng, n, -3.0, 3.0);
    const auto va = RandomVec(rng, n, 0.1, 4.0);
    const auto vb = RandomVec(rng, n, 0.1, 4.0);

    ExpectClose(ref.dot(a.data(), b.data(), n), vec.dot(a.data(), b.data(), n));
    ExpectClose(ref.mahalanobis_diag(a.data(), b.data(), va.data(), n),
                vec.mahalanobis_diag(a.data(), b.data(), va.data(), n));
    ExpectClose(ref.symmetric_kl_diag(a.data(), va.data(), b.data(), vb.data(), n),
                vec.symmetric_kl_diag(a.data(), va.data(), b.data(), vb.data(), n));

    std::vector<double> r1 = va, r2 = va;
    ref.accumulate(a.data(), r1.data(), n);
    vec.accumulate(a.data(), r2.data(), n);
    for (std::size_t i = 0; i < n; ++i) ExpectClose(r1[i], r2[i]);

    r1 = vb;
    r2 = vb;
    ref.axpy(0.37, a.data(), r1.data(), n);
    vec.axpy(0.37, a.data(), r2.data(), n);
    for (std::size_t i = 0; i < n; ++i) ExpectClose(r1[i], r2[i]);

    r1 = vb;
    r2 = vb;
    ref.accumulate_sq_dev(a.data(), b.data(), r1.data(), n);
    vec.accumulate_sq_dev(a.data(), b.data(), r2.data(), n);
    for (std::size_t i = 0; i < n; ++i) ExpectClose(r1[i], r2[i]);
  }
}

std::vector<const KernelTable*> AvailableVariants() {
  std::vector<const KernelTable*> v;
  if (const KernelTable* k = Avx2Kernels()) v.push_back(k);
  if (const KernelTable* k = NeonKernels()) v.push_back(k);
  if (v.empty()) v.push_back(&ScalarKernels());
  return v;
}

INSTANTIATE_TEST_SUITE_P(Variants, KernelEquivalence, ::testing::ValuesIn(AvailableVariants()),
                         [](const auto& info) { return std::string(info.param->name); });

TEST(Kernels, ScalarKlIsZeroForIdentity) {
  const std::vector<double> m{1.0, -2.0, 3.5}, v{0.5, 2.0, 1.0};
  EXPECT_EQ(ScalarKernels().symmetric_kl_diag(m.data(), v.data(), m.data(), v.data(), 3), 0.0);
}

TEST(Kernels, ActiveTableIsComplete) {
  const KernelTable& k = Active();
  EXPECT_FALSE(k.name.empty());
  EXPECT_NE(k.dot, nullptr);
  EXPECT_NE(k.symmetric_kl_diag, nullptr);
}

}  // namespace
}  // namespace lcd::simd
