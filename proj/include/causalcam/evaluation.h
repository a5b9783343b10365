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

#ifndef CAUSALCAM_EVALUATION_H_
#define CAUSALCAM_EVALUATION_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalcam/attribution.h"
#include "causalcam/dataset.h"
#include "causalcam/image.h"
#include "causalcam/model.h"

namespace causalcam {

// Deletion keeps pixels whose map value exceeds the threshold; insertion
// keeps the rest. The two masks are exact complements.
enum class MaskMode { kDeletion, kInsertion };

enum class Method { kGradCam, kCausal };

std::string_view MaskModeName(MaskMode mode);
std::string_view MethodName(Method method);
MaskMode ParseMaskMode(std::string_view name);
Method ParseMethod(std::string_view name);

struct MaskSpec {
  double threshold = 0.5;
  MaskMode mode = MaskMode::kDeletion;
};

// 0/1 valued, same shape as the map.
Image Binarize(const AttributionMap& map, const MaskSpec& spec);
Image Binarize(const Image& map, const MaskSpec& spec);

// Pixelwise product. Throws Error(kInvalidArgument) on shape mismatch.
Image ApplyMask(const Image& image, const Image& mask);

// n evenly spaced values from `min` to `max` inclusive, each rounded to 1e-9
// so the grid does not drift. Throws Error(kInvalidArgument) when the range
// is not a whole number of steps.
std::vector<double> ThresholdGrid(double min, double max, double step);
// 0.10, 0.11, ..., 0.90: 81 values.
std::vector<double> DefaultThresholds();

struct CurveRow {
  double threshold = 0.0;
  double huffman_ratio_mean = 0.0;
  double accuracy = 0.0;

  bool operator==(const CurveRow& other) const = default;
};

struct EvaluationCurve {
  Method method = Method::kGradCam;
  MaskMode mode = MaskMode::kDeletion;
  std::vector<CurveRow> rows;
  std::string dataset_digest;
  std::string model_digest;
};

struct EvaluationOptions {
  // Threads used for per-image work. Results do not depend on this value.
  int workers = 1;
};

// For every threshold: map each image with `method` on `model`, binarize,
// mask, re-classify with `model`. Accuracy is against the stored label; the
// Huffman ratio is averaged in dataset order.
EvaluationCurve Sweep(const ModelCheckpoint& model,
                      std::span<const LabeledImage> images, Method method,
                      MaskMode mode, std::span<const double> thresholds,
                      const EvaluationOptions& options = {});

struct NamedModel {
  std::string name;
  const ModelCheckpoint* model = nullptr;
};

struct TransferCell {
  std::string target;
  Method method = Method::kGradCam;
  double threshold = 0.0;
  double accuracy = 0.0;
};

struct TransferRatio {
  Method method = Method::kGradCam;
  double threshold = 0.0;
  double huffman_ratio_mean = 0.0;
};

struct TransferTable {
  std::string source;
  std::string source_digest;
  std::vector<std::string> targets;
  std::vector<Method> methods;
  std::vector<double> thresholds;
  // Ordered by (threshold, method, target).
  std::vector<TransferCell> accuracies;
  // Ordered by (threshold, method).
  std::vector<TransferRatio> ratios;

  double Accuracy(std::string_view target, Method method,
                  double threshold) const;
  double Ratio(Method method, double threshold) const;
};

// Deletion masks come from `source`; every target classifies the masked
// images. Throws Error(kInvalidArgument) if input shapes differ.
TransferTable Transfer(const NamedModel& source,
                       std::span<const NamedModel> targets,
                       std::span<const LabeledImage> images,
                       std::span<const double> thresholds,
                       std::span<const Method> methods,
                       const EvaluationOptions& options = {});

// CSV header: method,mode,threshold,huffman_ratio_mean,accuracy
std::string CurveToCsv(std::span<const EvaluationCurve> curves);
// CSV header:
// source_model,target_model,method,threshold,huffman_ratio_mean,accuracy
std::string TransferToCsv(const TransferTable& table);

}  // namespace causalcam

#endif  // CAUSALCAM_EVALUATION_H_
