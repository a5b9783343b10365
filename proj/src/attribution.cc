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

#include "causalcam/attribution.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "causalcam/checkpoint.h"
#include "causalcam/error.h"
#include "causalcam/tape.h"
#include "fmt/core.h"

namespace causalcam {

namespace {

struct Recorded {
  ForwardPass pass;
  int predicted_class = 0;
};

Recorded Record(const ModelCheckpoint& model, const Image& image, Tape& tape) {
  Recorded r;
  r.pass = Forward(model, image, tape);
  r.predicted_class = ArgMax(tape.value(r.pass.logits).data());
  return r;
}

ChannelImportance GradCamImportance(Tape& tape, const Recorded& r, int layer) {
  const Var score = tape.Select(r.pass.logits, r.predicted_class);
  const Gradients grads = tape.Backward(score);
  return {ImportanceKind::kGradCam, SpatialSum(grads[r.pass.activation]),
          layer};
}

ChannelImportance ContrastImportance(Tape& tape, const Recorded& r,
                                     const std::array<float, 2>& target,
                                     ImportanceKind kind, int layer) {
  const Var loss = tape.Mse(tape.Softmax(r.pass.logits), target);
  const Gradients grads = tape.Backward(loss);
  return {kind, SpatialSum(grads[r.pass.activation]), layer};
}

}  // namespace

std::string_view ImportanceKindName(ImportanceKind kind) {
  switch (kind) {
    case ImportanceKind::kGradCam:
      return "gradcam";
    case ImportanceKind::kContrastPQ:
      return "contrast_pq";
    case ImportanceKind::kContrastNotPNotQ:
      return "contrast_notp_notq";
    case ImportanceKind::kContrastPNotP:
      return "contrast_p_notp";
  }
  return "unknown";
}

std::string_view MapKindName(MapKind kind) {
  switch (kind) {
    case MapKind::kGradCam:
      return "gradcam";
    case MapKind::kContrast:
      return "contrast";
    case MapKind::kCausal:
      return "causal";
  }
  return "unknown";
}

ContrastTarget ContrastTarget::For(ImportanceKind kind, int predicted_class) {
  if (predicted_class != 0 && predicted_class != 1) {
    throw Error(
        ErrorCode::kInvalidArgument,
        fmt::format("predicted class {} is not binary", predicted_class));
  }
  switch (kind) {
    case ImportanceKind::kContrastPQ:
      return {kind, {1.0f, 1.0f}};
    case ImportanceKind::kContrastNotPNotQ:
      return {kind, {0.0f, 0.0f}};
    case ImportanceKind::kContrastPNotP: {
      ContrastTarget t{kind, {0.0f, 0.0f}};
      t.target[predicted_class] = 1.0f;
      return t;
    }
    case ImportanceKind::kGradCam:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "gradcam is not a contrastive target");
}

std::vector<float> SpatialSum(const Tensor& grad) {
  const int channels = grad.shape()[0];
  const size_t plane = grad.size() / static_cast<size_t>(channels);
  std::vector<float> alpha(channels, 0.0f);
  for (int k = 0; k < channels; ++k) {
    float sum = 0.0f;
    for (size_t i = 0; i < plane; ++i) sum += grad[k * plane + i];
    alpha[k] = sum;
  }
  return alpha;
}

Image WeightedSum(std::span<const float> alpha, const Tensor& activations) {
  if (activations.shape().rank() != 3 ||
      static_cast<size_t>(activations.shape()[0]) != alpha.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{} scores for activations of shape {}",
                            alpha.size(), activations.shape().ToString()));
  }
  const int height = activations.shape()[1];
  const int width = activations.shape()[2];
  const size_t plane = static_cast<size_t>(height) * width;
  Image out(height, width);
  for (size_t k = 0; k < alpha.size(); ++k) {
    const float a = alpha[k];
    for (size_t i = 0; i < plane; ++i) {
      out.pixels[i] += a * activations[k * plane + i];
    }
  }
  return out;
}

Image Upsample(const Image& source, int height, int width) {
  if (height < source.height || width < source.width || source.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("cannot upsample {}x{} to {}x{}", source.height,
                            source.width, height, width));
  }
  if (height == source.height && width == source.width) return source;

  // Align-corners source coordinate of output index i.
  auto coord = [](int i, int src, int dst, int& lo, double& frac) {
    if (src == 1 || dst == 1) {
      lo = 0;
      frac = 0.0;
      return;
    }
    const double pos = static_cast<double>(i) * (src - 1) / (dst - 1);
    lo = std::min(static_cast<int>(pos), src - 2);
    frac = pos - lo;
  };

  Image out(height, width);
  for (int r = 0; r < height; ++r) {
    int r0 = 0;
    double fr = 0.0;
    coord(r, source.height, height, r0, fr);
    const int r1 = std::min(r0 + 1, source.height - 1);
    for (int c = 0; c < width; ++c) {
      int c0 = 0;
      double fc = 0.0;
      coord(c, source.width, width, c0, fc);
      const int c1 = std::min(c0 + 1, source.width - 1);
      const double top =
          (1.0 - fc) * source.at(r0, c0) + fc * source.at(r0, c1);
      const double bottom =
          (1.0 - fc) * source.at(r1, c0) + fc * source.at(r1, c1);
      out.at(r, c) = static_cast<float>((1.0 - fr) * top + fr * bottom);
    }
  }
  return out;
}

Image NormalizeMap(const Image& raw) {
  float max = 0.0f;
  for (float v : raw.pixels) {
    if (v < 0.0f || !std::isfinite(v)) {
      throw Error(
          ErrorCode::kContractViolation,
          fmt::format("map entry {} is not a nonnegative finite value", v));
    }
    max = std::max(max, v);
  }
  Image out = raw;
  if (max == 0.0f) return out;
  for (float& v : out.pixels) v /= max;
  return out;
}

std::vector<float> NormalizeMaxAbs(std::span<const float> alpha) {
  float max = 0.0f;
  for (float v : alpha) max = std::max(max, std::fabs(v));
  std::vector<float> out(alpha.begin(), alpha.end());
  if (max == 0.0f) return out;
  for (float& v : out) v /= max;
  return out;
}

std::vector<float> CombineImportances(std::span<const float> gradcam,
                                      std::span<const float> contrast_pq,
                                      std::span<const float> contrast_np_nq,
                                      std::span<const float> contrast_p_np) {
  const size_t k = gradcam.size();
  if (contrast_pq.size() != k || contrast_np_nq.size() != k ||
      contrast_p_np.size() != k) {
    throw Error(ErrorCode::kInvalidArgument,
                "importance vectors differ in length");
  }
  std::vector<float> coefficients(k);
  for (size_t i = 0; i < k; ++i) {
    coefficients[i] =
        -(gradcam[i] - contrast_pq[i] + contrast_np_nq[i] + contrast_p_np[i]);
  }
  return coefficients;
}

std::vector<float> CausalCoefficients(std::span<const float> gradcam,
                                      std::span<const float> contrast_pq,
                                      std::span<const float> contrast_np_nq,
                                      std::span<const float> contrast_p_np) {
  return CombineImportances(
      NormalizeMaxAbs(gradcam), NormalizeMaxAbs(contrast_pq),
      NormalizeMaxAbs(contrast_np_nq), NormalizeMaxAbs(contrast_p_np));
}

Image ComposeMap(std::span<const float> alpha, const Tensor& activations,
                 int height, int width) {
  Image raw = WeightedSum(alpha, activations);
  for (float& v : raw.pixels) v = v > 0.0f ? v : 0.0f;
  return NormalizeMap(Upsample(raw, height, width));
}

AttributionEngine::AttributionEngine(const ModelCheckpoint& model)
    : model_(model), model_digest_(ModelDigest(model)) {}

AttributionMap AttributionEngine::MakeMap(MapKind kind, Image values,
                                          const Image& input) const {
  return {kind, std::move(values), model_digest_, ImageDigest(input)};
}

ImportanceResult AttributionEngine::GradCam(const Image& image) const {
  Tape tape;
  const Recorded r = Record(model_, image, tape);
  ImportanceResult result;
  result.predicted_class = r.predicted_class;
  result.importance = GradCamImportance(tape, r, model_.arch.attribution_layer);
  result.map =
      MakeMap(MapKind::kGradCam,
              ComposeMap(result.importance.alpha, tape.value(r.pass.activation),
                         image.height, image.width),
              image);
  return result;
}

ImportanceResult AttributionEngine::Contrast(const Image& image,
                                             ImportanceKind kind) const {
  Tape tape;
  const Recorded r = Record(model_, image, tape);
  const ContrastTarget target = ContrastTarget::For(kind, r.predicted_class);
  ImportanceResult result;
  result.predicted_class = r.predicted_class;
  result.importance = ContrastImportance(tape, r, target.target, kind,
                                         model_.arch.attribution_layer);
  result.map =
      MakeMap(MapKind::kContrast,
              ComposeMap(result.importance.alpha, tape.value(r.pass.activation),
                         image.height, image.width),
              image);
  return result;
}

ImportanceResult AttributionEngine::ContrastToTarget(
    const Image& image, const std::array<float, 2>& target,
    ImportanceKind kind) const {
  Tape tape;
  const Recorded r = Record(model_, image, tape);
  ImportanceResult result;
  result.predicted_class = r.predicted_class;
  result.importance =
      ContrastImportance(tape, r, target, kind, model_.arch.attribution_layer);
  result.map =
      MakeMap(MapKind::kContrast,
              ComposeMap(result.importance.alpha, tape.value(r.pass.activation),
                         image.height, image.width),
              image);
  return result;
}

CausalResult AttributionEngine::Causal(const Image& image) const {
  Tape tape;
  const Recorded r = Record(model_, image, tape);
  const int layer = model_.arch.attribution_layer;
  CausalResult result;
  result.predicted_class = r.predicted_class;
  result.importances[0] = GradCamImportance(tape, r, layer);
  const ImportanceKind contrasts[3] = {ImportanceKind::kContrastPQ,
                                       ImportanceKind::kContrastNotPNotQ,
                                       ImportanceKind::kContrastPNotP};
  for (int i = 0; i < 3; ++i) {
    const ContrastTarget target =
        ContrastTarget::For(contrasts[i], r.predicted_class);
    result.importances[i + 1] =
        ContrastImportance(tape, r, target.target, contrasts[i], layer);
  }
  result.backward_passes = tape.backward_count();
  result.coefficients = CausalCoefficients(
      result.importances[0].alpha, result.importances[1].alpha,
      result.importances[2].alpha, result.importances[3].alpha);
  result.map =
      MakeMap(MapKind::kCausal,
              ComposeMap(result.coefficients, tape.value(r.pass.activation),
                         image.height, image.width),
              image);
  return result;
}

std::string MapToCsv(const Image& map) {
  std::string out;
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      if (c > 0) out += ',';
      out += fmt::format("{:.9g}", map.at(r, c));
    }
    out += '\n';
  }
  return out;
}

void WriteMapCsv(const Image& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  const std::string text = MapToCsv(map);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path));
}

}  // namespace causalcam
