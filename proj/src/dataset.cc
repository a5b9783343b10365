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

#include "causalcam/dataset.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "causalcam/digest.h"
#include "causalcam/error.h"
#include "causalcam/rng.h"
#include "fmt/core.h"

namespace causalcam {

namespace fs = std::filesystem;

namespace {

constexpr int kNoiseCell = 16;
constexpr float kBackgroundBase = 0.15f;
constexpr float kBackgroundRange = 0.30f;
constexpr float kBlobAmplitude = 0.35f;

// Bilinearly interpolated value noise on a coarse lattice.
void DrawBackground(SplitMix64& rng, Image& image) {
  const int size = image.height;
  const int cells = std::max(2, size / kNoiseCell);
  std::vector<float> lattice(static_cast<size_t>(cells + 1) * (cells + 1));
  for (float& v : lattice) v = rng.UniformFloat();
  const float scale = static_cast<float>(cells) / static_cast<float>(size - 1);
  for (int r = 0; r < size; ++r) {
    const float u = static_cast<float>(r) * scale;
    const int r0 = std::min(static_cast<int>(u), cells - 1);
    const float fr = u - static_cast<float>(r0);
    for (int c = 0; c < size; ++c) {
      const float v = static_cast<float>(c) * scale;
      const int c0 = std::min(static_cast<int>(v), cells - 1);
      const float fc = v - static_cast<float>(c0);
      const float* top = &lattice[static_cast<size_t>(r0) * (cells + 1) + c0];
      const float* bottom = top + (cells + 1);
      const float value = (1.0f - fr) * ((1.0f - fc) * top[0] + fc * top[1]) +
                          fr * ((1.0f - fc) * bottom[0] + fc * bottom[1]);
      image.at(r, c) = kBackgroundBase + kBackgroundRange * value;
    }
  }
}

void DrawBlob(SplitMix64& rng, Image& image) {
  const int size = image.height;
  const float lo = static_cast<float>(size) / 4.0f;
  const float hi = 3.0f * static_cast<float>(size) / 4.0f;
  const float cr = rng.UniformFloat(lo, hi);
  const float cc = rng.UniformFloat(lo, hi);
  const float sigma = static_cast<float>(size) / 6.0f;
  const float denom = 2.0f * sigma * sigma;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const float dr = static_cast<float>(r) - cr;
      const float dc = static_cast<float>(c) - cc;
      image.at(r, c) += kBlobAmplitude * std::exp(-(dr * dr + dc * dc) / denom);
    }
  }
}

Box DrawChecker(SplitMix64& rng, Image& image) {
  const int span = image.height - 2 * kPatchMargin - kCheckerSize + 1;
  Box box;
  box.row = kPatchMargin + static_cast<int>(rng.UniformInt(span));
  box.col = kPatchMargin + static_cast<int>(rng.UniformInt(span));
  box.height = kCheckerSize;
  box.width = kCheckerSize;
  const std::vector<float>& pattern = CheckerPattern();
  for (int r = 0; r < kCheckerSize; ++r) {
    for (int c = 0; c < kCheckerSize; ++c) {
      image.at(box.row + r, box.col + c) = pattern[r * kCheckerSize + c];
    }
  }
  return box;
}

LabeledImage DrawImage(const GeneratorConfig& config, uint64_t index,
                       int label) {
  SplitMix64 rng = SplitMix64::Derive(config.seed, index);
  LabeledImage item;
  item.label = label;
  item.image = Image(config.size, config.size);
  DrawBackground(rng, item.image);
  const double p_blob = label == 1 ? config.context_correlation
                                   : 1.0 - config.context_correlation;
  const bool blob = rng.Bernoulli(p_blob);
  item.context_present = blob;
  if (blob) DrawBlob(rng, item.image);
  if (label == 1) item.causal_box = DrawChecker(rng, item.image);
  for (float& v : item.image.pixels) v = std::clamp(v, 0.0f, 1.0f);
  return item;
}

std::vector<fs::path> SortedFiles(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kLoad,
                fmt::format("{}: missing folder", dir.string()));
  }
  std::vector<fs::path> files;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

std::vector<LabeledImage> LoadSplit(const fs::path& root, const char* split,
                                    int& height, int& width) {
  std::vector<LabeledImage> images;
  for (int label = 0; label < 2; ++label) {
    for (const fs::path& file :
         SortedFiles(root / split / std::to_string(label))) {
      LabeledImage item;
      item.image = ReadPgm(file.string());
      item.label = label;
      if (height < 0) {
        height = item.image.height;
        width = item.image.width;
      } else if (item.image.height != height || item.image.width != width) {
        throw Error(
            ErrorCode::kLoad,
            fmt::format("{}: image is {}x{}, expected {}x{}", file.string(),
                        item.image.height, item.image.width, height, width));
      }
      images.push_back(std::move(item));
    }
  }
  return images;
}

}  // namespace

bool Box::Contains(const Box& inner) const {
  return inner.row >= row && inner.col >= col &&
         inner.row + inner.height <= row + height &&
         inner.col + inner.width <= col + width;
}

int TestSplitSize(int n) { return 2 * ((n + 5) / 10); }

const std::vector<float>& CheckerPattern() {
  static const std::vector<float> pattern = [] {
    std::vector<float> p(kCheckerSize * kCheckerSize);
    for (int r = 0; r < kCheckerSize; ++r) {
      for (int c = 0; c < kCheckerSize; ++c) {
        p[r * kCheckerSize + c] = (r + c) % 2 == 0 ? 1.0f : 0.0f;
      }
    }
    return p;
  }();
  return pattern;
}

DatasetSplit Generate(const GeneratorConfig& config) {
  if (config.n <= 0 || config.n % 2 != 0) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("n must be positive and even, got {}", config.n));
  }
  if (config.size < 32) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("size must be at least 32, got {}", config.size));
  }
  if (!(config.context_correlation >= 0.5 &&
        config.context_correlation <= 1.0)) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("context correlation must lie in [0.5, 1], got {}",
                            config.context_correlation));
  }
  const int n_test = TestSplitSize(config.n);
  const int n_train = config.n - n_test;
  if (n_test <= 0 || n_train <= 0) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("n = {} leaves an empty split", config.n));
  }

  DatasetSplit split;
  split.seed = config.seed;
  split.generator_version = kGeneratorVersion;
  split.train.reserve(n_train);
  split.test.reserve(n_test);
  for (int j = 0; j < n_train; ++j) {
    split.train.push_back(DrawImage(config, j, j % 2));
  }
  for (int j = 0; j < n_test; ++j) {
    split.test.push_back(DrawImage(config, n_train + j, j % 2));
  }
  return split;
}

DatasetSplit LoadFolder(const std::string& path) {
  const fs::path root(path);
  DatasetSplit split;
  int height = -1;
  int width = -1;
  split.train = LoadSplit(root, "train", height, width);
  split.test = LoadSplit(root, "test", height, width);
  return split;
}

void ExportFolder(const DatasetSplit& split, const std::string& path) {
  const fs::path root(path);
  auto write = [&](const std::vector<LabeledImage>& images, const char* name) {
    for (int label = 0; label < 2; ++label) {
      fs::create_directories(root / name / std::to_string(label));
    }
    for (size_t i = 0; i < images.size(); ++i) {
      const fs::path file = root / name / std::to_string(images[i].label) /
                            fmt::format("{:05d}.pgm", i);
      WritePgm(images[i].image, file.string());
    }
  };
  write(split.train, "train");
  write(split.test, "test");
}

bool ContainsChecker(const Image& image) {
  const std::vector<float>& pattern = CheckerPattern();
  for (int r = 0; r + kCheckerSize <= image.height; ++r) {
    for (int c = 0; c + kCheckerSize <= image.width; ++c) {
      bool match = true;
      for (int i = 0; i < kCheckerSize && match; ++i) {
        for (int j = 0; j < kCheckerSize; ++j) {
          if (image.at(r + i, c + j) != pattern[i * kCheckerSize + j]) {
            match = false;
            break;
          }
        }
      }
      if (match) return true;
    }
  }
  return false;
}

std::string DatasetDigest(const DatasetSplit& split) {
  std::string bytes =
      fmt::format("seed={};version={};", split.seed, split.generator_version);
  for (const auto* images : {&split.train, &split.test}) {
    bytes += fmt::format("split:{};", images->size());
    for (const LabeledImage& item : *images) {
      bytes += fmt::format("{}:{}x{};", item.label, item.image.height,
                           item.image.width);
      bytes.append(reinterpret_cast<const char*>(item.image.pixels.data()),
                   item.image.pixels.size() * sizeof(float));
    }
  }
  return Sha256Hex(std::string_view(bytes));
}

}  // namespace causalcam
