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

#ifndef CAUSALCAM_TESTS_TESTING_FIXTURES_H_
#define CAUSALCAM_TESTS_TESTING_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "causalcam/dataset.h"
#include "causalcam/image.h"
#include "causalcam/model.h"
#include "causalcam/train.h"

namespace causalcam::testing {

// Pinned configuration of the reference experiment.
inline constexpr int kCorpusSize = 800;
inline constexpr int kImageSize = 64;
inline constexpr uint64_t kDataSeed = 1;
inline constexpr double kContextCorrelation = 0.9;
inline constexpr uint64_t kSmallTrainSeed = 7;
inline constexpr uint64_t kMediumTrainSeed = 11;

GeneratorConfig CorpusConfig();
Hyperparams SmallHyperparams();
Hyperparams MediumHyperparams();

// Generated once per process.
const DatasetSplit& Corpus();
// ConvNet-S and ConvNet-M trained on Corpus() with the pinned
// hyperparameters. Trained once per process.
const ModelCheckpoint& TrainedSmall();
const ModelCheckpoint& TrainedMedium();

// Pixels uniform in [0, 1).
Image RandomImage(int height, int width, uint64_t seed);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& bytes);

}  // namespace causalcam::testing

#endif  // CAUSALCAM_TESTS_TESTING_FIXTURES_H_
