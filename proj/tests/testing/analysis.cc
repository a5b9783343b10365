/*
 * Copyright 2026 The causalcam Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "testing/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace causalcam::testing {

namespace {

struct BinTotals {
  double accuracy_sum = 0.0;
  int rows = 0;
};

std::vector<BinTotals> Bucket(const EvaluationCurve& curve, double lo,
                              double width, int bins) {
  std::vector<BinTotals> totals(bins);
  for (const CurveRow& row : curve.rows) {
    int b = width > 0.0
                ? static_cast<int>((row.huffman_ratio_mean - lo) / width)
                : 0;
    b = std::clamp(b, 0, bins - 1);
    totals[b].accuracy_sum += row.accuracy;
    ++totals[b].rows;
  }
  return totals;
}

}  // namespace

BinComparison CompareInRatioBins(const EvaluationCurve& gradcam,
                                 const EvaluationCurve& causal, int bins) {
  BinComparison out;
  out.bins = bins;
  bool first = true;
  for (const EvaluationCurve* curve : {&gradcam, &causal}) {
    for (const CurveRow& row : curve->rows) {
      if (first) {
        out.ratio_min = out.ratio_max = row.huffman_ratio_mean;
        first = false;
      }
      out.ratio_min = std::min(out.ratio_min, row.huffman_ratio_mean);
      out.ratio_max = std::max(out.ratio_max, row.huffman_ratio_mean);
    }
  }
  const double width = (out.ratio_max - out.ratio_min) / bins;
  const std::vector<BinTotals> g = Bucket(gradcam, out.ratio_min, width, bins);
  const std::vector<BinTotals> c = Bucket(causal, out.ratio_min, width, bins);
  for (int b = 0; b < bins; ++b) {
    if (g[b].rows == 0 || c[b].rows == 0) continue;
    ++out.jointly_populated;
    if (c[b].accuracy_sum / c[b].rows >= g[b].accuracy_sum / g[b].rows) {
      ++out.causal_not_worse;
    }
  }
  return out;
}

double NonIncreasingFraction(const EvaluationCurve& curve) {
  if (curve.rows.size() < 2) return 1.0;
  int ok = 0;
  for (size_t i = 1; i < curve.rows.size(); ++i) {
    ok += curve.rows[i].huffman_ratio_mean <=
          curve.rows[i - 1].huffman_ratio_mean;
  }
  return static_cast<double>(ok) / (curve.rows.size() - 1);
}

Image RecombineCausal(const std::array<ChannelImportance, 4>& alphas,
                      const Volume<float>& a, int height, int width) {
  std::array<std::vector<float>, 4> n;
  for (int v = 0; v < 4; ++v) {
    float m = 0.0f;
    for (float x : alphas[v].alpha) m = std::max(m, std::fabs(x));
    for (float x : alphas[v].alpha) n[v].push_back(m == 0.0f ? x : x / m);
  }
  std::vector<float> raw(static_cast<size_t>(a.height) * a.width, 0.0f);
  for (int k = 0; k < a.channels; ++k) {
    const float coef = -(n[0][k] - n[1][k] + n[2][k] + n[3][k]);
    for (int r = 0; r < a.height; ++r) {
      for (int c = 0; c < a.width; ++c) {
        raw[r * a.width + c] += coef * a.at(k, r, c);
      }
    }
  }
  for (float& v : raw) v = std::max(v, 0.0f);
  Image up(height, width);
  for (int r = 0; r < height; ++r) {
    const double y = static_cast<double>(r) * (a.height - 1) / (height - 1);
    const int y0 = std::min(static_cast<int>(y), a.height - 2);
    const double fy = y - y0;
    for (int c = 0; c < width; ++c) {
      const double x = static_cast<double>(c) * (a.width - 1) / (width - 1);
      const int x0 = std::min(static_cast<int>(x), a.width - 2);
      const double fx = x - x0;
      auto at = [&](int rr, int cc) {
        return static_cast<double>(raw[rr * a.width + cc]);
      };
      up.at(r, c) = static_cast<float>(
          (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x0 + 1)) +
          fy * ((1 - fx) * at(y0 + 1, x0) + fx * at(y0 + 1, x0 + 1)));
    }
  }
  float m = 0.0f;
  for (float v : up.pixels) m = std::max(m, v);
  if (m > 0.0f) {
    for (float& v : up.pixels) v /= m;
  }
  return up;
}

uint64_t ExhaustivePrefixCodeMinimum(const std::vector<uint64_t>& freqs) {
  const int n = static_cast<int>(freqs.size());
  const int max_len = std::max(1, n - 1);
  std::vector<int> len(n, 1);
  uint64_t best = std::numeric_limits<uint64_t>::max();
  while (true) {
    double kraft = 0.0;
    uint64_t bits = 0;
    for (int i = 0; i < n; ++i) {
      kraft += std::ldexp(1.0, -len[i]);
      bits += freqs[i] * len[i];
    }
    if (kraft <= 1.0) best = std::min(best, bits);
    int i = 0;
    while (i < n && len[i] == max_len) len[i++] = 1;
    if (i == n) break;
    ++len[i];
  }
  return best;
}

double EmpiricalEntropyBits(const SymbolHistogram& histogram, double n) {
  double h = 0.0;
  for (uint64_t f : histogram) {
    if (f == 0) continue;
    const double p = f / n;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace causalcam::testing
