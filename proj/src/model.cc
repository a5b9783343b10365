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
#include <utility>

#include "causalcam/error.h"
#include "causalcam/ops.h"
#include "causalcam/rng.h"
#include "fmt/core.h"

namespace causalcam {

namespace {

std::string_view LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv:
      return "conv";
    case LayerKind::kRelu:
      return "relu";
    case LayerKind::kMaxPool:
      return "maxpool";
    case LayerKind::kDense:
      return "dense";
  }
  return "unknown";
}

LayerSpec Conv(int in, int out) { return {LayerKind::kConv, in, out, 3}; }
LayerSpec Relu() { return {LayerKind::kRelu, 0, 0, 0}; }
LayerSpec Pool() { return {LayerKind::kMaxPool, 0, 0, 0}; }
LayerSpec Dense(int in, int out) { return {LayerKind::kDense, in, out, 0}; }

[[noreturn]] void Invalid(const ArchDescriptor& arch, const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("architecture '{}': {}", arch.name, msg));
}

size_t KernelSize(const LayerSpec& layer) {
  switch (layer.kind) {
    case LayerKind::kConv:
      return static_cast<size_t>(layer.out) * layer.in * layer.kernel *
             layer.kernel;
    case LayerKind::kDense:
      return static_cast<size_t>(layer.out) * layer.in;
    default:
      return 0;
  }
}

size_t BiasSize(const LayerSpec& layer) {
  return layer.kind == LayerKind::kConv || layer.kind == LayerKind::kDense
             ? static_cast<size_t>(layer.out)
             : 0;
}

Shape KernelShape(const LayerSpec& layer) {
  if (layer.kind == LayerKind::kConv) {
    return Shape{layer.out, layer.in, layer.kernel, layer.kernel};
  }
  return Shape{layer.out, layer.in};
}

Tensor Slice(const std::vector<float>& weights, size_t offset, size_t count,
             Shape shape) {
  return Tensor(std::move(shape),
                std::vector<float>(weights.begin() + offset,
                                   weights.begin() + offset + count));
}

void CheckInput(const ModelCheckpoint& model, const Image& image) {
  if (image.height != model.arch.input_height ||
      image.width != model.arch.input_width) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("image is {}x{} but model '{}' expects {}x{}",
                            image.height, image.width, model.arch.name,
                            model.arch.input_height, model.arch.input_width));
  }
  if (model.weights.size() != model.arch.ParameterCount()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("model '{}' has {} weights, architecture needs {}",
                            model.arch.name, model.weights.size(),
                            model.arch.ParameterCount()));
  }
}

[[noreturn]] void RethrowWithLayer(const Error& e, size_t layer_index,
                                   LayerKind kind) {
  throw Error(e.code(), fmt::format("layer {} ({}): {}", layer_index,
                                    LayerKindName(kind), e.what()));
}

}  // namespace

ArchDescriptor ArchDescriptor::ConvNetS(int size) {
  ArchDescriptor arch;
  arch.name = "convnet-s";
  arch.input_height = size;
  arch.input_width = size;
  const int flat = 16 * (size / 4) * (size / 4);
  arch.layers = {Conv(1, 8), Relu(), Pool(),        Conv(8, 16),
                 Relu(),     Pool(), Dense(flat, 2)};
  arch.attribution_layer = 3;
  if (size <= 0 || size % 4 != 0)
    Invalid(arch, "input size must be a multiple of 4");
  return arch;
}

ArchDescriptor ArchDescriptor::ConvNetM(int size) {
  ArchDescriptor arch;
  arch.name = "convnet-m";
  arch.input_height = size;
  arch.input_width = size;
  const int flat = 32 * (size / 8) * (size / 8);
  arch.layers = {Conv(1, 8), Relu(),       Pool(), Conv(8, 16), Relu(),
                 Pool(),     Conv(16, 32), Relu(), Pool(),      Dense(flat, 2)};
  arch.attribution_layer = 6;
  if (size <= 0 || size % 8 != 0)
    Invalid(arch, "input size must be a multiple of 8");
  return arch;
}

ArchDescriptor ArchDescriptor::ByName(const std::string& name, int size) {
  if (name == "convnet-s") return ConvNetS(size);
  if (name == "convnet-m") return ConvNetM(size);
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown architecture '{}'", name));
}

size_t ArchDescriptor::ParameterCount() const {
  size_t n = 0;
  for (const LayerSpec& layer : layers)
    n += KernelSize(layer) + BiasSize(layer);
  return n;
}

void ArchDescriptor::Validate() const {
  if (name.empty()) Invalid(*this, "empty name");
  if (input_height <= 0 || input_width <= 0) Invalid(*this, "empty input");
  if (layers.empty()) Invalid(*this, "no layers");
  int channels = 1;
  int height = input_height;
  int width = input_width;
  bool flat = false;
  int last_conv = -1;
  for (size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& layer = layers[i];
    switch (layer.kind) {
      case LayerKind::kConv:
        if (flat) Invalid(*this, fmt::format("conv layer {} after dense", i));
        if (layer.in != channels || layer.out <= 0 || layer.kernel <= 0 ||
            layer.kernel % 2 == 0) {
          Invalid(*this, fmt::format("conv layer {} is malformed", i));
        }
        channels = layer.out;
        last_conv = static_cast<int>(i);
        break;
      case LayerKind::kRelu:
        break;
      case LayerKind::kMaxPool:
        if (flat || height % 2 != 0 || width % 2 != 0) {
          Invalid(*this, fmt::format("pool layer {} needs even extents", i));
        }
        height /= 2;
        width /= 2;
        break;
      case LayerKind::kDense: {
        const int in = flat ? channels : channels * height * width;
        if (layer.in != in || layer.out <= 0) {
          Invalid(*this, fmt::format("dense layer {} expects {} inputs, has {}",
                                     i, in, layer.in));
        }
        flat = true;
        channels = layer.out;
        break;
      }
    }
  }
  if (!flat || channels != 2) Invalid(*this, "output head must emit 2 logits");
  if (attribution_layer != last_conv || last_conv < 0) {
    Invalid(*this, "attribution layer must be the last conv layer");
  }
  if (static_cast<size_t>(attribution_layer + 1) >= layers.size() ||
      layers[attribution_layer + 1].kind != LayerKind::kRelu) {
    Invalid(*this, "attribution layer must be followed by a ReLU");
  }
}

std::vector<ModelCheckpoint::ParamSlice> ModelCheckpoint::ParamSlices() const {
  std::vector<ParamSlice> slices(arch.layers.size());
  size_t offset = 0;
  for (size_t i = 0; i < arch.layers.size(); ++i) {
    ParamSlice& s = slices[i];
    s.kernel_offset = offset;
    s.kernel_size = KernelSize(arch.layers[i]);
    offset += s.kernel_size;
    s.bias_offset = offset;
    s.bias_size = BiasSize(arch.layers[i]);
    offset += s.bias_size;
  }
  return slices;
}

ModelCheckpoint InitializeModel(const ArchDescriptor& arch, uint64_t seed) {
  arch.Validate();
  ModelCheckpoint model;
  model.arch = arch;
  model.train_seed = seed;
  model.weights.reserve(arch.ParameterCount());
  SplitMix64 rng = SplitMix64::Derive(seed, 0x696e6974);  // "init"
  for (const LayerSpec& layer : arch.layers) {
    const size_t count = KernelSize(layer) + BiasSize(layer);
    if (count == 0) continue;
    const int fan_in = layer.kind == LayerKind::kConv
                           ? layer.in * layer.kernel * layer.kernel
                           : layer.in;
    const float bound = static_cast<float>(std::sqrt(1.0 / fan_in));
    for (size_t i = 0; i < count; ++i) {
      model.weights.push_back(rng.UniformFloat(-bound, bound));
    }
  }
  return model;
}

ForwardPass Forward(const ModelCheckpoint& model, const Image& image,
                    Tape& tape) {
  CheckInput(model, image);
  const std::vector<ModelCheckpoint::ParamSlice> slices = model.ParamSlices();
  ForwardPass pass;
  pass.input =
      tape.Leaf(Tensor(Shape{1, image.height, image.width}, image.pixels));
  Var current = pass.input;
  for (size_t i = 0; i < model.arch.layers.size(); ++i) {
    const LayerSpec& layer = model.arch.layers[i];
    try {
      switch (layer.kind) {
        case LayerKind::kConv:
        case LayerKind::kDense: {
          const ModelCheckpoint::ParamSlice& s = slices[i];
          Var kernel = tape.Leaf(Slice(model.weights, s.kernel_offset,
                                       s.kernel_size, KernelShape(layer)));
          Var bias = tape.Leaf(Slice(model.weights, s.bias_offset, s.bias_size,
                                     Shape{layer.out}));
          pass.params.push_back(kernel);
          pass.params.push_back(bias);
          current = layer.kind == LayerKind::kConv
                        ? tape.Conv2d(current, kernel, bias)
                        : tape.Dense(current, kernel, bias);
          break;
        }
        case LayerKind::kRelu:
          current = tape.Relu(current);
          break;
        case LayerKind::kMaxPool:
          current = tape.MaxPool2(current);
          break;
      }
    } catch (const Error& e) {
      RethrowWithLayer(e, i, layer.kind);
    }
    if (static_cast<int>(i) == model.arch.attribution_layer + 1) {
      pass.activation = current;
    }
  }
  pass.logits = current;
  return pass;
}

std::array<float, 2> Logits(const ModelCheckpoint& model, const Image& image) {
  CheckInput(model, image);
  const std::vector<ModelCheckpoint::ParamSlice> slices = model.ParamSlices();
  Tensor current(Shape{1, image.height, image.width}, image.pixels);
  for (size_t i = 0; i < model.arch.layers.size(); ++i) {
    const LayerSpec& layer = model.arch.layers[i];
    switch (layer.kind) {
      case LayerKind::kConv:
      case LayerKind::kDense: {
        const ModelCheckpoint::ParamSlice& s = slices[i];
        const Tensor kernel = Slice(model.weights, s.kernel_offset,
                                    s.kernel_size, KernelShape(layer));
        const Tensor bias =
            Slice(model.weights, s.bias_offset, s.bias_size, Shape{layer.out});
        current = layer.kind == LayerKind::kConv
                      ? ops::Conv2dForward(current, kernel, bias)
                      : ops::DenseForward(current, kernel, bias);
        break;
      }
      case LayerKind::kRelu:
        current = ops::ReluForward(current);
        break;
      case LayerKind::kMaxPool:
        current = ops::MaxPool2Forward(current, nullptr);
        break;
    }
    if (!current.AllFinite()) {
      throw Error(ErrorCode::kNumericOverflow,
                  fmt::format("layer {} ({}): non-finite value", i,
                              LayerKindName(layer.kind)));
    }
  }
  return {current[0], current[1]};
}

int ArgMax(std::span<const float> logits) {
  int best = 0;
  for (size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = static_cast<int>(i);
  }
  return best;
}

std::array<float, 2> Softmax(const std::array<float, 2>& logits) {
  const Tensor p = ops::SoftmaxForward(
      Tensor(Shape{2}, std::vector<float>(logits.begin(), logits.end())));
  return {p[0], p[1]};
}

Prediction Predict(const ModelCheckpoint& model, const Image& image) {
  Prediction prediction;
  prediction.logits = Logits(model, image);
  prediction.probabilities = Softmax(prediction.logits);
  prediction.predicted_class = ArgMax(prediction.logits);
  return prediction;
}

double Accuracy(const ModelCheckpoint& model,
                std::span<const LabeledImage> images) {
  if (images.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "accuracy of an empty image list");
  }
  size_t correct = 0;
  for (const LabeledImage& item : images) {
    if (ArgMax(Logits(model, item.image)) == item.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(images.size());
}

}  // namespace causalcam
