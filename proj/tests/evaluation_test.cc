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

#include "causalcam/evaluation.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "causalcam/attribution.h"
#include "causalcam/checkpoint.h"
#include "causalcam/error.h"
#include "causalcam/huffman.h"
#include "causalcam/model.h"
#include "gtest/gtest.h"
#include "testing/analysis.h"
#include "testing/fixtures.h"

namespace causalcam {
namespace {

std::span<const LabeledImage> TestImages() { return testing::Corpus().test; }

std::vector<LabeledImage> FirstTestImages(size_t n) {
  return {TestImages().begin(), TestImages().begin() + n};
}

EvaluationCurve CurveFromRatios(const std::vector<double>& ratios,
                                const std::vector<double>& accuracies) {
  EvaluationCurve curve;
  for (size_t i = 0; i < ratios.size(); ++i) {
    curve.rows.push_back({0.1 + 0.01 * i, ratios[i], accuracies[i]});
  }
  return curve;
}

TEST(BinarizeTest, Examples) {
  const Image map(2, 2, std::vector<float>{0.05f, 0.5f, 0.95f, 0.1f});
  EXPECT_EQ(Binarize(map, {0.4, MaskMode::kDeletion}),
            Image(2, 2, std::vector<float>{0, 1, 1, 0}));
  EXPECT_EQ(Binarize(map, {0.4, MaskMode::kInsertion}),
            Image(2, 2, std::vector<float>{1, 0, 0, 1}));
  EXPECT_EQ(Binarize(Image(2, 2, 1.0f), {1.0, MaskMode::kDeletion}),
            Image(2, 2));
}

TEST(BinarizeTest, ModesAreComplements) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const Image map = testing::RandomImage(9, 7, seed);
    for (double t : DefaultThresholds()) {
      const Image del = Binarize(map, {t, MaskMode::kDeletion});
      const Image ins = Binarize(map, {t, MaskMode::kInsertion});
      for (int i = 0; i < map.size(); ++i) {
        ASSERT_EQ(del.pixels[i] + ins.pixels[i], 1.0f);
      }
    }
  }
}

TEST(ApplyMaskTest, Examples) {
  const Image image = testing::RandomImage(3, 3, 1);
  EXPECT_EQ(ApplyMask(image, Image(3, 3, 1.0f)), image);
  EXPECT_EQ(ApplyMask(image, Image(3, 3)), Image(3, 3));
  EXPECT_EQ(ApplyMask(Image(1, 2, std::vector<float>{0.3f, 0.7f}),
                      Image(1, 2, std::vector<float>{1.0f, 0.0f})),
            Image(1, 2, std::vector<float>{0.3f, 0.0f}));
  EXPECT_THROW(ApplyMask(image, Image(3, 2)), Error);
}

TEST(ThresholdGridTest, DefaultHas81ExactValues) {
  const std::vector<double> grid = DefaultThresholds();
  ASSERT_EQ(grid.size(), 81u);
  EXPECT_EQ(grid.front(), 0.1);
  EXPECT_EQ(grid[40], 0.5);
  EXPECT_EQ(grid.back(), 0.9);
  EXPECT_EQ(ThresholdGrid(0.1, 0.5, 0.1),
            (std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}));
  EXPECT_THROW(ThresholdGrid(0.1, 0.55, 0.1), Error);
  EXPECT_THROW(ThresholdGrid(0.5, 0.1, 0.1), Error);
}

TEST(NamesTest, RoundTrip) {
  EXPECT_EQ(ParseMethod(MethodName(Method::kCausal)), Method::kCausal);
  EXPECT_EQ(ParseMaskMode(MaskModeName(MaskMode::kInsertion)),
            MaskMode::kInsertion);
  EXPECT_THROW(ParseMethod("rise"), Error);
}

TEST(SweepTest, DefaultGridGives81RowsAndEndpointIsConstantRate) {
  const ModelCheckpoint& model = testing::TrainedSmall();
  const std::vector<LabeledImage> images = FirstTestImages(24);
  std::vector<double> grid = DefaultThresholds();
  grid.push_back(1.0);
  const EvaluationCurve curve =
      Sweep(model, images, Method::kGradCam, MaskMode::kDeletion, grid);
  ASSERT_EQ(curve.rows.size(), 82u);
  const int blank = ArgMax(Logits(model, Image(64, 64)));
  double rate = 0.0;
  for (const LabeledImage& item : images) rate += item.label == blank;
  EXPECT_EQ(curve.rows.back().accuracy, rate / images.size());
  // All-zero images cost 1 bit per pixel.
  double h = 0.0;
  for (const LabeledImage& item : images) {
    h += static_cast<double>(64 * 64) / HuffmanBits(item.image);
  }
  EXPECT_DOUBLE_EQ(curve.rows.back().huffman_ratio_mean, h / images.size());
  for (const CurveRow& row : curve.rows) {
    EXPECT_GT(row.huffman_ratio_mean, 0.0);
    EXPECT_GE(row.accuracy, 0.0);
    EXPECT_LE(row.accuracy, 1.0);
  }
  EXPECT_EQ(curve.model_digest, ModelDigest(model));
  EXPECT_FALSE(curve.dataset_digest.empty());
}

TEST(SweepTest, DeterministicAndIndependentOfWorkers) {
  const ModelCheckpoint& model = testing::TrainedSmall();
  const std::vector<LabeledImage> images = FirstTestImages(16);
  const std::vector<double> grid = DefaultThresholds();
  const EvaluationCurve a =
      Sweep(model, images, Method::kCausal, MaskMode::kInsertion, grid);
  const EvaluationCurve b =
      Sweep(model, images, Method::kCausal, MaskMode::kInsertion, grid);
  const EvaluationCurve c = Sweep(model, images, Method::kCausal,
                                  MaskMode::kInsertion, grid, {.workers = 4});
  const std::vector<EvaluationCurve> ca = {a};
  const std::vector<EvaluationCurve> cb = {b};
  const std::vector<EvaluationCurve> cc = {c};
  EXPECT_EQ(CurveToCsv(ca), CurveToCsv(cb));
  EXPECT_EQ(a.rows, c.rows);
  EXPECT_EQ(CurveToCsv(ca), CurveToCsv(cc));
}

TEST(SweepTest, RejectsBadThresholds) {
  const std::vector<LabeledImage> images = FirstTestImages(2);
  const ModelCheckpoint& model = testing::TrainedSmall();
  for (const std::vector<double>& grid :
       {std::vector<double>{}, std::vector<double>{0.5, 0.4},
        std::vector<double>{0.2, 1.5}}) {
    EXPECT_THROW(
        Sweep(model, images, Method::kGradCam, MaskMode::kDeletion, grid),
        Error);
  }
}

TEST(SweepTest, CsvFormat) {
  EvaluationCurve curve = CurveFromRatios({0.5, 0.25}, {1.0, 0.875});
  curve.method = Method::kCausal;
  const std::vector<EvaluationCurve> curves = {curve};
  EXPECT_EQ(CurveToCsv(curves),
            "method,mode,threshold,huffman_ratio_mean,accuracy\n"
            "causal,deletion,0.100000,0.500000,1.000000\n"
            "causal,deletion,0.110000,0.250000,0.875000\n");
}

TEST(SweepTest, DeletionRatioIsNonIncreasingOnTrainedConvNetS) {
  const std::vector<double> grid = DefaultThresholds();
  for (Method method : {Method::kGradCam, Method::kCausal}) {
    const EvaluationCurve curve =
        Sweep(testing::TrainedSmall(), TestImages(), method,
              MaskMode::kDeletion, grid, {.workers = 4});
    EXPECT_GE(testing::NonIncreasingFraction(curve), 0.99)
        << MethodName(method);
  }
}

TEST(TransferTest, GridShapeAndSelfTransfer) {
  const ModelCheckpoint& small = testing::TrainedSmall();
  const ModelCheckpoint other =
      InitializeModel(ArchDescriptor::ConvNetM(64), 3);
  const std::vector<NamedModel> targets = {
      {"s", &small}, {"m", &other}, {"m2", &other}, {"s2", &small}};
  const std::vector<double> grid = ThresholdGrid(0.1, 0.5, 0.1);
  const std::vector<Method> methods = {Method::kGradCam, Method::kCausal};
  const std::vector<LabeledImage> images = FirstTestImages(20);
  const TransferTable table =
      Transfer({"s", &small}, targets, images, grid, methods);
  EXPECT_EQ(table.accuracies.size(), 40u);
  EXPECT_EQ(table.ratios.size(), 10u);
  EXPECT_EQ(table.source_digest, ModelDigest(small));
  for (Method method : methods) {
    const EvaluationCurve sweep =
        Sweep(small, images, method, MaskMode::kDeletion, grid);
    for (const CurveRow& row : sweep.rows) {
      EXPECT_EQ(table.Accuracy("s", method, row.threshold), row.accuracy);
      EXPECT_EQ(table.Accuracy("s2", method, row.threshold), row.accuracy);
      EXPECT_EQ(table.Ratio(method, row.threshold), row.huffman_ratio_mean);
    }
  }
  EXPECT_THROW(table.Accuracy("zz", Method::kCausal, 0.1), Error);
  const std::string csv = TransferToCsv(table);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "source_model,target_model,method,threshold,huffman_ratio_mean,"
            "accuracy");
}

TEST(TransferTest, RejectsMismatchedInputShapes) {
  const ModelCheckpoint& small = testing::TrainedSmall();
  const ModelCheckpoint tiny = InitializeModel(ArchDescriptor::ConvNetS(32), 1);
  const std::vector<NamedModel> targets = {{"t", &tiny}};
  const std::vector<double> grid = {0.5};
  const std::vector<Method> methods = {Method::kGradCam};
  EXPECT_THROW(
      Transfer({"s", &small}, targets, FirstTestImages(2), grid, methods),
      Error);
}

TEST(AnalysisTest, BinComparisonByHand) {
  // Ratios span [0, 1]; bins of width 0.1.
  const EvaluationCurve gradcam =
      CurveFromRatios({1.0, 0.55, 0.52, 0.05}, {0.9, 0.6, 0.8, 0.5});
  const EvaluationCurve causal =
      CurveFromRatios({0.58, 0.31, 0.0}, {0.7, 0.9, 0.4});
  const testing::BinComparison cmp =
      testing::CompareInRatioBins(gradcam, causal, 10);
  EXPECT_EQ(cmp.ratio_min, 0.0);
  EXPECT_EQ(cmp.ratio_max, 1.0);
  // Bin 0: 0.4 vs 0.5. Bin 5: 0.7 vs mean(0.6, 0.8) = 0.7.
  EXPECT_EQ(cmp.jointly_populated, 2);
  EXPECT_EQ(cmp.causal_not_worse, 1);
}

TEST(AnalysisTest, NonIncreasingFraction) {
  EXPECT_EQ(testing::NonIncreasingFraction(
                CurveFromRatios({0.5, 0.5, 0.4, 0.45, 0.3}, {1, 1, 1, 1, 1})),
            0.75);
}

}  // namespace
}  // namespace causalcam
