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

#ifndef CAUSALCAM_HUFFMAN_H_
#define CAUSALCAM_HUFFMAN_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causalcam/image.h"

namespace causalcam {

using SymbolHistogram = std::array<uint64_t, 256>;

// Optimal prefix code over byte symbols.
//
// Tree construction repeatedly merges the two lightest nodes; among equal
// weights the node whose subtree holds the smallest symbol value is taken
// first. The first node popped becomes the left child (bit 0), the second the
// right child (bit 1). A lone symbol gets a 1-bit code.
class HuffmanCode {
 public:
  static HuffmanCode Build(const SymbolHistogram& histogram);

  // 0 for symbols that never occur.
  int length(int symbol) const { return lengths_[symbol]; }
  // Code bits, most significant first; valid when length(symbol) > 0.
  const std::string& code(int symbol) const { return codes_[symbol]; }

  // Sum over symbols of frequency * code length.
  uint64_t TotalBits(const SymbolHistogram& histogram) const;

 private:
  std::array<int, 256> lengths_{};
  std::array<std::string, 256> codes_{};
};

// round(255 * v) per pixel, v clamped to [0, 1].
SymbolHistogram QuantizedHistogram(const Image& image);

// Huffman-coded size of the 8-bit quantized image.
uint64_t HuffmanBits(const Image& image);

// HuffmanBits(masked) / HuffmanBits(original). Throws Error(kInvalidArgument)
// on shape mismatch.
double HuffmanRatio(const Image& original, const Image& masked);

}  // namespace causalcam

#endif  // CAUSALCAM_HUFFMAN_H_
