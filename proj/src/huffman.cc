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

#include "causalcam/huffman.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "causalcam/error.h"
#include "fmt/core.h"

namespace causalcam {

namespace {

struct Node {
  uint64_t weight = 0;
  int min_symbol = 0;
  int left = -1;
  int right = -1;
  int symbol = -1;  // Leaves only.
};

}  // namespace

HuffmanCode HuffmanCode::Build(const SymbolHistogram& histogram) {
  HuffmanCode code;
  std::vector<Node> nodes;
  using Entry = std::tuple<uint64_t, int, int>;  // weight, min symbol, node
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (int s = 0; s < 256; ++s) {
    if (histogram[s] == 0) continue;
    nodes.push_back({histogram[s], s, -1, -1, s});
    heap.emplace(histogram[s], s, static_cast<int>(nodes.size()) - 1);
  }
  if (nodes.empty()) return code;
  if (nodes.size() == 1) {
    code.lengths_[nodes[0].symbol] = 1;
    code.codes_[nodes[0].symbol] = "0";
    return code;
  }
  while (heap.size() > 1) {
    const auto [w0, s0, left] = heap.top();
    heap.pop();
    const auto [w1, s1, right] = heap.top();
    heap.pop();
    nodes.push_back({w0 + w1, std::min(s0, s1), left, right, -1});
    heap.emplace(w0 + w1, std::min(s0, s1), static_cast<int>(nodes.size()) - 1);
  }

  struct Pending {
    int node;
    std::string prefix;
  };
  std::vector<Pending> stack = {{std::get<2>(heap.top()), ""}};
  while (!stack.empty()) {
    Pending p = std::move(stack.back());
    stack.pop_back();
    const Node& n = nodes[p.node];
    if (n.symbol >= 0) {
      code.lengths_[n.symbol] = static_cast<int>(p.prefix.size());
      code.codes_[n.symbol] = p.prefix;
      continue;
    }
    stack.push_back({n.right, p.prefix + '1'});
    stack.push_back({n.left, p.prefix + '0'});
  }
  return code;
}

uint64_t HuffmanCode::TotalBits(const SymbolHistogram& histogram) const {
  uint64_t bits = 0;
  for (int s = 0; s < 256; ++s) {
    bits += histogram[s] * static_cast<uint64_t>(lengths_[s]);
  }
  return bits;
}

SymbolHistogram QuantizedHistogram(const Image& image) {
  SymbolHistogram histogram{};
  for (float v : image.pixels) {
    ++histogram[std::lround(255.0f * std::clamp(v, 0.0f, 1.0f))];
  }
  return histogram;
}

uint64_t HuffmanBits(const Image& image) {
  const SymbolHistogram histogram = QuantizedHistogram(image);
  return HuffmanCode::Build(histogram).TotalBits(histogram);
}

double HuffmanRatio(const Image& original, const Image& masked) {
  if (!original.SameShape(masked)) {
    throw Error(
        ErrorCode::kInvalidArgument,
        fmt::format("huffman ratio of {}x{} and {}x{} images", original.height,
                    original.width, masked.height, masked.width));
  }
  const uint64_t denominator = HuffmanBits(original);
  if (denominator == 0) {
    throw Error(ErrorCode::kInvalidArgument, "huffman ratio of an empty image");
  }
  return static_cast<double>(HuffmanBits(masked)) /
         static_cast<double>(denominator);
}

}  // namespace causalcam
