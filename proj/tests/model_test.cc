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

#include "causalcam/model.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "causalcam/checkpoint.h"
#include "causalcam/dataset.h"
#include "causalcam/error.h"
#include "causalcam/train.h"
#include "gtest/gtest.h"
#include "testing/fixtures.h"

namespace causalcam {
namespace {

// ConvNet-S whose class-1 logit is the sum of the input (after two
// center-tap convolutions) and whose class-0 logit is a constant half of the
// maximum. Bright images are class 1, dark ones class 0.
ModelCheckpoint BrightnessModel(int size) {
  ModelCheckpoint model;
  model.arch = ArchDescriptor::ConvNetS(size);
  model.weights.assign(model.arch.ParameterCount(), 0.0f);
  const auto slices = model.ParamSlices();
  model.weights[slices[0].kernel_offset + 4] = 1.0f;  // conv1 o0 c0 center
  model.weights[slices[3].kernel_offset + 4] = 1.0f;  // conv2 o0 c0 center
  const int cells = (size / 4) * (size / 4);
  const size_t dense = slices[6].kernel_offset;
  const size_t in = model.arch.layers[6].in;
  for (int i = 0; i < cells; ++i) model.weights[dense + in + i] = 1.0f;
  model.weights[slices[6].bias_offset] = cells / 2.0f;
  return model;
}

ModelCheckpoint ConstantModel(int size) {
  ModelCheckpoint model;
  model.arch = ArchDescriptor::ConvNetS(size);
  model.weights.assign(model.arch.ParameterCount(), 0.0f);
  model.weights[model.ParamSlices()[6].bias_offset] = 1.0f;
  return model;
}

LabeledImage Labeled(float fill, int label) {
  return {Image(32, 32, fill), label, std::nullopt, std::nullopt};
}

TEST(ArchTest, ZooShapes) {
  const ArchDescriptor s = ArchDescriptor::ConvNetS(64);
  const ArchDescriptor m = ArchDescriptor::ConvNetM(64);
  EXPECT_NO_THROW(s.Validate());
  EXPECT_NO_THROW(m.Validate());
  EXPECT_EQ(s.ParameterCount(), 80u + 1168u + 16 * 16 * 16 * 2 + 2);
  EXPECT_EQ(m.ParameterCount(), 80u + 1168u + 4640u + 32 * 8 * 8 * 2 + 2);
  EXPECT_EQ(s.attribution_layer, 3);
  EXPECT_EQ(m.attribution_layer, 6);
  EXPECT_EQ(ArchDescriptor::ByName("convnet-m", 32),
            ArchDescriptor::ConvNetM(32));
  EXPECT_THROW(ArchDescriptor::ByName("resnet", 64), Error);
  EXPECT_THROW(ArchDescriptor::ConvNetM(36), Error);
}

TEST(ArchTest, ValidateRejectsBrokenStacks) {
  ArchDescriptor arch = ArchDescriptor::ConvNetS(32);
  arch.attribution_layer = 0;
  EXPECT_THROW(arch.Validate(), Error);
  arch = ArchDescriptor::ConvNetS(32);
  arch.layers.back().in += 1;
  EXPECT_THROW(arch.Validate(), Error);
  arch = ArchDescriptor::ConvNetS(32);
  arch.layers.back().out = 3;
  EXPECT_THROW(arch.Validate(), Error);
}

TEST(InitTest, UniformFanInBoundsAndDeterminism) {
  const ModelCheckpoint a = InitializeModel(ArchDescriptor::ConvNetS(32), 1);
  const ModelCheckpoint b = InitializeModel(ArchDescriptor::ConvNetS(32), 1);
  const ModelCheckpoint c = InitializeModel(ArchDescriptor::ConvNetS(32), 2);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_NE(a.weights, c.weights);
  const auto slices = a.ParamSlices();
  const float conv1_bound = std::sqrt(1.0f / 9.0f);
  for (size_t i = 0; i < slices[0].kernel_size; ++i) {
    EXPECT_LE(std::fabs(a.weights[slices[0].kernel_offset + i]), conv1_bound);
  }
}

TEST(PredictTest, ArgMaxAndTies) {
  EXPECT_EQ(ArgMax(std::vector<float>{2.0f, 0.5f}), 0);
  EXPECT_EQ(ArgMax(std::vector<float>{1.0f, 1.0f}), 0);
  EXPECT_EQ(ArgMax(std::vector<float>{0.0f, 3.0f}), 1);
}

TEST(PredictTest, ProbabilitiesSumToOne) {
  const ModelCheckpoint model =
      InitializeModel(ArchDescriptor::ConvNetS(32), 4);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const Prediction p = Predict(model, testing::RandomImage(32, 32, seed));
    EXPECT_NEAR(p.probabilities[0] + p.probabilities[1], 1.0, 1e-6);
    EXPECT_EQ(p.predicted_class, ArgMax(p.logits));
  }
  const std::array<float, 2> extreme = Softmax({1000.0f, -1000.0f});
  EXPECT_EQ(extreme[0], 1.0f);
  EXPECT_EQ(extreme[1], 0.0f);
}

TEST(AccuracyTest, Fixtures) {
  const std::vector<LabeledImage> balanced = {
      Labeled(0.0f, 0), Labeled(1.0f, 1), Labeled(0.0f, 0), Labeled(1.0f, 1)};
  EXPECT_EQ(Accuracy(ConstantModel(32), balanced), 0.5);
  EXPECT_EQ(Accuracy(BrightnessModel(32), balanced), 1.0);
  std::vector<LabeledImage> one_wrong = balanced;
  one_wrong[3].label = 0;
  EXPECT_EQ(Accuracy(BrightnessModel(32), one_wrong), 0.75);
  EXPECT_THROW(Accuracy(BrightnessModel(32), std::vector<LabeledImage>{}),
               Error);
}

TEST(CheckpointTest, RoundTripIsByteIdentical) {
  ModelCheckpoint model = InitializeModel(ArchDescriptor::ConvNetM(32), 12);
  model.train_config_digest = "abc123";
  const std::string bytes = SerializeCheckpoint(model);
  EXPECT_EQ(bytes.substr(0, 4), "CLNS");
  const ModelCheckpoint back = DeserializeCheckpoint(bytes);
  EXPECT_EQ(back, model);
  EXPECT_EQ(SerializeCheckpoint(back), bytes);

  testing::TempDir dir("ckpt");
  SaveCheckpoint(model, dir / "m.clns");
  EXPECT_EQ(testing::ReadFile(dir / "m.clns"), bytes);
  EXPECT_EQ(LoadCheckpoint(dir / "m.clns"), model);
  EXPECT_EQ(ModelDigest(back), ModelDigest(model));
}

TEST(CheckpointTest, LayoutIsLittleEndianAfterHeader) {
  const ModelCheckpoint model =
      InitializeModel(ArchDescriptor::ConvNetS(32), 1);
  const std::string bytes = SerializeCheckpoint(model);
  uint32_t version = 0;
  uint32_t header = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&header, bytes.data() + 8, 4);
  EXPECT_EQ(version, kCheckpointVersion);
  EXPECT_EQ(bytes.size(), 12 + header + 4 * model.weights.size());
  float first = 0.0f;
  std::memcpy(&first, bytes.data() + 12 + header, 4);
  EXPECT_EQ(first, model.weights[0]);
  EXPECT_EQ(bytes[12], '{');
}

ErrorCode DecodeError(const std::string& bytes) {
  try {
    DeserializeCheckpoint(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "checkpoint accepted";
  return ErrorCode::kIo;
}

TEST(CheckpointTest, DistinctErrors) {
  const ModelCheckpoint model =
      InitializeModel(ArchDescriptor::ConvNetS(32), 1);
  const std::string bytes = SerializeCheckpoint(model);

  std::string magic = bytes;
  magic.replace(0, 4, "XXXX");
  EXPECT_EQ(DecodeError(magic), ErrorCode::kBadMagic);

  EXPECT_EQ(DecodeError(bytes.substr(0, bytes.size() - 1)),
            ErrorCode::kTruncated);
  EXPECT_EQ(DecodeError(bytes.substr(0, 10)), ErrorCode::kTruncated);

  std::string version = bytes;
  version[4] = 2;
  EXPECT_EQ(DecodeError(version), ErrorCode::kVersionMismatch);

  EXPECT_EQ(DecodeError(bytes + "z"), ErrorCode::kCorrupt);

  std::string nan = bytes;
  const float bad = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + nan.size() - 4, &bad, 4);
  EXPECT_EQ(DecodeError(nan), ErrorCode::kCorrupt);

  std::string json = bytes;
  json[12] = '[';
  EXPECT_EQ(DecodeError(json), ErrorCode::kCorrupt);
}

TEST(CheckpointTest, LoadErrorsNameThePath) {
  testing::TempDir dir("bad");
  testing::WriteFile(dir / "x.clns", "XXXX0000");
  try {
    LoadCheckpoint(dir / "x.clns");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
    EXPECT_NE(std::string(e.what()).find("x.clns"), std::string::npos);
  }
  EXPECT_THROW(LoadCheckpoint(dir / "missing.clns"), Error);
}

TEST(TrainTest, DeterministicOnSmallConfig) {
  const DatasetSplit data = Generate({40, 32, 2, 0.9});
  Hyperparams hp;
  hp.epochs = 2;
  hp.seed = 5;
  std::vector<double> losses;
  const ModelCheckpoint a =
      Train(ArchDescriptor::ConvNetS(32), data, hp,
            [&](const EpochStats& s) { losses.push_back(s.mean_loss); });
  const ModelCheckpoint b = Train(ArchDescriptor::ConvNetS(32), data, hp);
  EXPECT_EQ(SerializeCheckpoint(a), SerializeCheckpoint(b));
  EXPECT_EQ(losses.size(), 2u);
  EXPECT_EQ(a.train_seed, 5u);
  EXPECT_FALSE(a.train_config_digest.empty());
  hp.seed = 6;
  EXPECT_NE(Train(ArchDescriptor::ConvNetS(32), data, hp).weights, a.weights);
}

TEST(TrainTest, HugeLearningRateDiverges) {
  Hyperparams hp = testing::SmallHyperparams();
  hp.learning_rate = 1e6;
  try {
    Train(ArchDescriptor::ConvNetS(testing::kImageSize), testing::Corpus(), hp);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTrainingDiverged);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(TrainTest, RejectsBadHyperparameters) {
  const DatasetSplit data = Generate({40, 32, 2, 0.9});
  for (auto mutate : std::vector<void (*)(Hyperparams&)>{
           [](Hyperparams& h) { h.epochs = 0; },
           [](Hyperparams& h) { h.batch_size = 0; },
           [](Hyperparams& h) { h.learning_rate = -1; },
           [](Hyperparams& h) { h.momentum = 1.0; }}) {
    Hyperparams hp;
    mutate(hp);
    try {
      Train(ArchDescriptor::ConvNetS(32), data, hp);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
    }
  }
  EXPECT_THROW(Train(ArchDescriptor::ConvNetS(64), data, Hyperparams{}), Error);
}

TEST(TrainTest, ConvNetSReachesTargetAccuracyOnPinnedCorpus) {
  const ModelCheckpoint& model = testing::TrainedSmall();
  EXPECT_GE(Accuracy(model, testing::Corpus().test), 0.95);
}

}  // namespace
}  // namespace causalcam
