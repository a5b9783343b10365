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

#ifndef CAUSALCAM_MODEL_H_
#define CAUSALCAM_MODEL_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causalcam/dataset.h"
#include "causalcam/image.h"
#include "causalcam/tape.h"
#include "causalcam/tensor.h"

namespace causalcam {

enum class LayerKind { kConv, kRelu, kMaxPool, kDense };

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  // kConv: in/out channels, square odd kernel. kDense: in/out features.
  int in = 0;
  int out = 0;
  int kernel = 0;

  bool operator==(const LayerSpec& other) const = default;
};

struct ArchDescriptor {
  std::string name;
  int input_height = 0;
  int input_width = 0;
  std::vector<LayerSpec> layers;
  // Index of the last conv layer. Its attribution activations A are the
  // output of the ReLU that immediately follows it.
  int attribution_layer = -1;

  // conv8-ReLU-pool, conv16-ReLU-pool, dense-2. `size` divisible by 4.
  static ArchDescriptor ConvNetS(int size);
  // conv8, conv16, conv32, each with ReLU + pool, then dense-2. `size`
  // divisible by 8.
  static ArchDescriptor ConvNetM(int size);
  // Looks up "convnet-s" / "convnet-m".
  static ArchDescriptor ByName(const std::string& name, int size);

  size_t ParameterCount() const;
  // Throws Error(kInvalidArgument) describing the first violated invariant.
  void Validate() const;

  bool operator==(const ArchDescriptor& other) const = default;
};

// A trained classifier. Immutable once built; safe to share across threads.
struct ModelCheckpoint {
  ArchDescriptor arch;
  std::vector<float> weights;  // Layer order; per layer kernel then bias.
  uint64_t train_seed = 0;
  std::string train_config_digest;

  // Offsets of each layer's kernel and bias inside `weights`.
  struct ParamSlice {
    size_t kernel_offset = 0;
    size_t kernel_size = 0;
    size_t bias_offset = 0;
    size_t bias_size = 0;
  };
  std::vector<ParamSlice> ParamSlices() const;

  bool operator==(const ModelCheckpoint& other) const = default;
};

// Uniform in +-sqrt(1 / fan_in) for kernels and biases, drawn from the
// pinned PRNG.
ModelCheckpoint InitializeModel(const ArchDescriptor& arch, uint64_t seed);

struct ForwardPass {
  Var input;
  Var logits;      // Shape {2}, pre-softmax.
  Var activation;  // Post-ReLU output of the attribution layer, (K, h, w).
  std::vector<Var> params;  // Same order as the checkpoint: kernel, bias, ...
};

// Records the forward pass on `tape`. Throws Error(kInvalidArgument) on shape
// mismatch and Error(kNumericOverflow) naming the layer on non-finite values.
ForwardPass Forward(const ModelCheckpoint& model, const Image& image,
                    Tape& tape);

// Tape-free forward; same arithmetic as Forward.
std::array<float, 2> Logits(const ModelCheckpoint& model, const Image& image);

struct Prediction {
  std::array<float, 2> logits{};
  std::array<float, 2> probabilities{};
  int predicted_class = 0;
};

// Argmax with ties broken toward the lower index.
int ArgMax(std::span<const float> logits);
std::array<float, 2> Softmax(const std::array<float, 2>& logits);

Prediction Predict(const ModelCheckpoint& model, const Image& image);

// Fraction of images whose prediction equals their label. Throws
// Error(kInvalidArgument) on an empty list.
double Accuracy(const ModelCheckpoint& model,
                std::span<const LabeledImage> images);

}  // namespace causalcam

#endif  // CAUSALCAM_MODEL_H_
