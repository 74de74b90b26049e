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
#include <numbers>

#include "lcd/detect.hpp"
#include "lcd/error.hpp"

namespace lcd {

DistanceContour SmoothContour(const DistanceContour& c, int h_l) {
  Require(h_l >= 1, ErrorCode::kInvalidArgument, "smoothing length must be at least 1");
  DistanceContour out = c;
  out.smoothed = true;
  if (h_l == 1 || c.values.empty()) return out;

  const int len = (h_l % 2 == 0) ? h_l + 1 : h_l;
  const int half = len / 2;
  std::vector<double> w(static_cast<std::size_t>(len));
  double total = 0.0;
  for (int k = 0; k < len; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / (len - 1));
    total += w[k];
  }
  for (double& x : w) x /= total;

  const auto n = static_cast<std::ptrdiff_t>(c.values.size());
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    double acc = 0.0;
    for (int k = 0; k < len; ++k) {
      const std::ptrdiff_t q = std::clamp<std::ptrdiff_t>(p + k - half, 0, n - 1);
      acc += w[k] * c.values[static_cast<std::size_t>(q)];
    }
    out.values[static_cast<std::size_t>(p)] = acc;
  }
  return out;
}

std::vector<double> ThresholdContour(const DistanceContour& c, double alpha, int N) {
  Require(N >= 1, ErrorCode::kInvalidArgument, "threshold window must be at least 1");
  const std::size_t n = c.values.size();
  std::vector<double> th(n);
  if (n == 0) return th;
  th[0] = alpha * c.values[0];
  const auto win = static_cast<std::size_t>(N);
  for (std::size_t p = 1; p < n; ++p) {
    const std::size_t begin = p > win ? p - win : 0;
    double sum = 0.0;
    for (std::size_t q = begin; q < p; ++q) sum += c.values[q];
    th[p] = alpha * sum / static_cast<double>(p - begin);
  }
  return th;
}

std::vector<Peak> PickPeaks(std::span<const double> contour, std::span<const double> threshold,
                            int min_dist) {
  Require(min_dist >= 1, ErrorCode::kInvalidArgument, "minimum peak distance must be at least 1");
  Require(threshold.size() == contour.size(), ErrorCode::kLengthMismatch,
          "threshold and contour differ in length");
  std::vector<Peak> cand;
  const std::size_t n = contour.size();
  for (std::size_t i = 1; i + 1 < n;) {
    if (contour[i] > contour[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && contour[j + 1] == contour[i]) ++j;
      if (j + 1 < n && contour[j + 1] < contour[i]) cand.push_back({i, contour[i]});
      i = j + 1;
    } else {
      ++i;
    }
  }

  std::stable_sort(cand.begin(), cand.end(),
                   [](const Peak& a, const Peak& b) { return a.height > b.height; });
  std::vector<Peak> accepted;
  const auto dist = static_cast<std::size_t>(min_dist);
  for (const Peak& p : cand) {
    const bool clear = std::all_of(accepted.begin(), accepted.end(), [&](const Peak& a) {
      const std::size_t d = a.position > p.position ? a.position - p.position
                                                    : p.position - a.position;
      return d >= dist;
    });
    if (clear) accepted.push_back(p);
  }

  std::vector<Peak> out;
  for (const Peak& p : accepted) {
    if (p.height > threshold[p.position]) out.push_back(p);
  }
  std::sort(out.begin(), out.end(),
            [](const Peak& a, const Peak& b) { return a.position < b.position; });
  return out;
}

}  // namespace lcd
