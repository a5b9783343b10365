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

#ifndef CAUSALCAM_DATASET_H_
#define CAUSALCAM_DATASET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causalcam/image.h"

namespace causalcam {

struct Box {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;

  bool Contains(const Box& inner) const;
  bool operator==(const Box& other) const = default;
};

struct LabeledImage {
  Image image;
  int label = 0;
  // Ground-truth location of the causal patch (synthetic class-1 images only).
  std::optional<Box> causal_box;
  // Whether the context blob was drawn (synthetic images only).
  std::optional<bool> context_present;
};

struct DatasetSplit {
  std::vector<LabeledImage> train;
  std::vector<LabeledImage> test;
  uint64_t seed = 0;
  int generator_version = 0;
};

inline constexpr int kGeneratorVersion = 1;
inline constexpr int kCheckerSize = 8;
inline constexpr int kPatchMargin = 4;

struct GeneratorConfig {
  int n = 0;
  int size = 64;
  uint64_t seed = 1;
  double context_correlation = 0.9;
};

// Size of the test split for n images: 2 * round(n / 10), i.e. 20% rounded to
// the nearest even count.
int TestSplitSize(int n);

// The 8x8 checkerboard (1 on even r + c, 0 otherwise) that marks class 1.
const std::vector<float>& CheckerPattern();

// Synthetic cause-vs-context data. Class 1 carries the checker patch; a large
// smooth blob agrees with the label with probability context_correlation.
// Image j of a split (train first, then test) has label j % 2 and is drawn
// from its own PRNG stream. Throws Error(kConfiguration) on bad arguments.
DatasetSplit Generate(const GeneratorConfig& config);

// Reads `train/{0,1}` and `test/{0,1}` folders of P5 files, sorted by name.
// Throws Error(kLoad) naming the offending file or folder.
DatasetSplit LoadFolder(const std::string& path);

// Writes the split in the LoadFolder layout as <index>.pgm files.
void ExportFolder(const DatasetSplit& split, const std::string& path);

// True if the checker pattern occurs anywhere in `image` (exact equality).
bool ContainsChecker(const Image& image);

std::string DatasetDigest(const DatasetSplit& split);

}  // namespace causalcam

#endif  // CAUSALCAM_DATASET_H_
