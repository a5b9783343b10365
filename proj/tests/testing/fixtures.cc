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

#include "testing/fixtures.h"

#include <unistd.h>

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "causalcam/rng.h"
#include "fmt/core.h"

namespace causalcam::testing {

GeneratorConfig CorpusConfig() {
  return {kCorpusSize, kImageSize, kDataSeed, kContextCorrelation};
}

Hyperparams SmallHyperparams() {
  Hyperparams hp;
  hp.seed = kSmallTrainSeed;
  return hp;
}

Hyperparams MediumHyperparams() {
  Hyperparams hp;
  hp.seed = kMediumTrainSeed;
  return hp;
}

const DatasetSplit& Corpus() {
  static const DatasetSplit split = Generate(CorpusConfig());
  return split;
}

const ModelCheckpoint& TrainedSmall() {
  static const ModelCheckpoint model =
      Train(ArchDescriptor::ConvNetS(kImageSize), Corpus(), SmallHyperparams());
  return model;
}

const ModelCheckpoint& TrainedMedium() {
  static const ModelCheckpoint model = Train(
      ArchDescriptor::ConvNetM(kImageSize), Corpus(), MediumHyperparams());
  return model;
}

Image RandomImage(int height, int width, uint64_t seed) {
  SplitMix64 rng(seed);
  Image image(height, width);
  for (float& v : image.pixels) v = rng.UniformFloat();
  return image;
}

TempDir::TempDir(const std::string& tag) {
  std::random_device device;
  path_ = std::filesystem::temp_directory_path() /
          fmt::format("causalcam-{}-{}-{:08x}", tag, ::getpid(), device());
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ignored;
  std::filesystem::remove_all(path_, ignored);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace causalcam::testing
