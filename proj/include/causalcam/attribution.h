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

#ifndef CAUSALCAM_ATTRIBUTION_H_
#define CAUSALCAM_ATTRIBUTION_H_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalcam/image.h"
#include "causalcam/model.h"
#include "causalcam/tensor.h"

namespace causalcam {

enum class ImportanceKind {
  kGradCam,
  kContrastPQ,        // "Why P or Q?", target [1, 1].
  kContrastNotPNotQ,  // "Why neither P nor Q?", target [0, 0].
  kContrastPNotP,     // "Why not P with full confidence?", one-hot at P.
};

enum class MapKind { kGradCam, kContrast, kCausal };

std::string_view ImportanceKindName(ImportanceKind kind);
std::string_view MapKindName(MapKind kind);

// Per-channel importance scores at the attribution layer.
struct ChannelImportance {
  ImportanceKind kind = ImportanceKind::kGradCam;
  std::vector<float> alpha;
  int layer = -1;
};

// Nonnegative heat map at input resolution. Max is exactly 1 unless the map
// is identically 0.
struct AttributionMap {
  MapKind kind = MapKind::kGradCam;
  Image values;
  std::string model_digest;
  std::string image_digest;
};

// Counterfactual softmax target for a contrastive map.
struct ContrastTarget {
  ImportanceKind kind = ImportanceKind::kContrastPQ;
  std::array<float, 2> target{};

  // `kind` must be one of the three contrast kinds; `predicted_class` picks
  // where the 1 goes for kContrastPNotP.
  static ContrastTarget For(ImportanceKind kind, int predicted_class);
};

struct ImportanceResult {
  ChannelImportance importance;
  AttributionMap map;
  int predicted_class = 0;
};

struct CausalResult {
  AttributionMap map;
  // Raw scores in the order gradcam, P/Q, notP/notQ, P/notP.
  std::array<ChannelImportance, 4> importances;
  // Signed per-channel weights fed to the final ReLU.
  std::vector<float> coefficients;
  int predicted_class = 0;
  int backward_passes = 0;
};

// alpha_k = sum over (y, x) of grad(k, y, x), ascending.
std::vector<float> SpatialSum(const Tensor& grad);

// Per-pixel sum_k alpha_k * A(k, y, x), ascending k. No ReLU.
Image WeightedSum(std::span<const float> alpha, const Tensor& activations);

// Bilinear, align-corners. Throws Error(kInvalidArgument) when shrinking.
Image Upsample(const Image& source, int height, int width);

// Divides by the max; all-zero stays all-zero. Throws
// Error(kContractViolation) on negative entries.
Image NormalizeMap(const Image& raw);

// Divides by the max absolute entry; zero vectors pass through.
std::vector<float> NormalizeMaxAbs(std::span<const float> alpha);

// -(a - pq + npnq + pnp), elementwise, on scores used as given.
std::vector<float> CombineImportances(std::span<const float> gradcam,
                                      std::span<const float> contrast_pq,
                                      std::span<const float> contrast_np_nq,
                                      std::span<const float> contrast_p_np);

// CombineImportances of the max-abs-normalized inputs.
std::vector<float> CausalCoefficients(std::span<const float> gradcam,
                                      std::span<const float> contrast_pq,
                                      std::span<const float> contrast_np_nq,
                                      std::span<const float> contrast_p_np);

// ReLU(sum_k alpha_k A^k), upsampled to (height, width), max-normalized.
Image ComposeMap(std::span<const float> alpha, const Tensor& activations,
                 int height, int width);

// Grad-CAM, contrastive and causal maps for one model. Holds a reference to
// the checkpoint, which must outlive it. One engine per worker.
class AttributionEngine {
 public:
  explicit AttributionEngine(const ModelCheckpoint& model);

  // Backpropagates the predicted logit y_P.
  ImportanceResult GradCam(const Image& image) const;

  // Backpropagates MSE(softmax(y), target) for one of the three patterns.
  ImportanceResult Contrast(const Image& image, ImportanceKind kind) const;

  // Same as Contrast with an arbitrary target; `kind` only labels the result.
  ImportanceResult ContrastToTarget(const Image& image,
                                    const std::array<float, 2>& target,
                                    ImportanceKind kind) const;

  // One forward pass, four backward passes (gradcam plus three contrasts).
  CausalResult Causal(const Image& image) const;

  const ModelCheckpoint& model() const { return model_; }

 private:
  AttributionMap MakeMap(MapKind kind, Image values, const Image& input) const;

  const ModelCheckpoint& model_;
  std::string model_digest_;
};

// Map export. CSV holds one line per row, values printed with enough digits
// to round-trip a float.
std::string MapToCsv(const Image& map);
void WriteMapCsv(const Image& map, const std::string& path);

}  // namespace causalcam

#endif  // CAUSALCAM_ATTRIBUTION_H_
