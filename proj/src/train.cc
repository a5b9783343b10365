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

#include "causalcam/train.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "causalcam/checkpoint.h"
#include "causalcam/digest.h"
#include "causalcam/error.h"
#include "causalcam/rng.h"
#include "causalcam/tape.h"
#include "fmt/core.h"
#include "json.hpp"

namespace causalcam {

namespace {

constexpr uint64_t kShuffleStream = 0x73687566;  // "shuf"

void ValidateHyperparams(const Hyperparams& hp) {
  if (hp.epochs <= 0 || hp.batch_size <= 0 || !(hp.learning_rate > 0.0) ||
      !(hp.momentum >= 0.0 && hp.momentum < 1.0) ||
      !std::isfinite(hp.learning_rate)) {
    throw Error(ErrorCode::kConfiguration,
                fmt::format("invalid hyperparameters {}", hp.ToJson()));
  }
}

}  // namespace

std::string Hyperparams::ToJson() const {
  return nlohmann::json{{"epochs", epochs},
                        {"batch_size", batch_size},
                        {"learning_rate", learning_rate},
                        {"momentum", momentum},
                        {"seed", seed}}
      .dump();
}

ModelCheckpoint Train(const ArchDescriptor& arch, const DatasetSplit& data,
                      const Hyperparams& hp,
                      const std::function<void(const EpochStats&)>& on_epoch) {
  ValidateHyperparams(hp);
  arch.Validate();
  if (data.train.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "training split is empty");
  }
  const Image& first = data.train.front().image;
  if (first.height != arch.input_height || first.width != arch.input_width) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("data is {}x{} but '{}' expects {}x{}",
                            first.height, first.width, arch.name,
                            arch.input_height, arch.input_width));
  }

  ModelCheckpoint model = InitializeModel(arch, hp.seed);
  model.train_config_digest = Sha256Hex(
      std::string_view(ArchToJson(arch) + hp.ToJson() + DatasetDigest(data)));

  const size_t num_params = model.weights.size();
  const float lr = static_cast<float>(hp.learning_rate);
  const float momentum = static_cast<float>(hp.momentum);
  std::vector<float> velocity(num_params, 0.0f);
  std::vector<float> grad_sum(num_params);
  std::vector<size_t> order(data.train.size());

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    SplitMix64 rng = SplitMix64::Derive(hp.seed ^ kShuffleStream,
                                        static_cast<uint64_t>(epoch));
    for (size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.UniformInt(i + 1)]);
    }

    double loss_sum = 0.0;
    bool any_gradient = false;
    try {
      for (size_t start = 0; start < order.size(); start += hp.batch_size) {
        const size_t end =
            std::min(order.size(), start + static_cast<size_t>(hp.batch_size));
        std::fill(grad_sum.begin(), grad_sum.end(), 0.0f);
        for (size_t b = start; b < end; ++b) {
          const LabeledImage& item = data.train[order[b]];
          Tape tape;
          const ForwardPass pass = Forward(model, item.image, tape);
          const float target[2] = {item.label == 0 ? 1.0f : 0.0f,
                                   item.label == 1 ? 1.0f : 0.0f};
          const Var loss = tape.Mse(tape.Softmax(pass.logits), target);
          loss_sum += tape.value(loss)[0];
          const Gradients grads = tape.Backward(loss);
          size_t offset = 0;
          for (const Var& p : pass.params) {
            const Tensor& g = grads[p];
            for (size_t k = 0; k < g.size(); ++k) grad_sum[offset + k] += g[k];
            offset += g.size();
          }
        }
        const float inv = 1.0f / static_cast<float>(end - start);
        for (size_t k = 0; k < num_params && !any_gradient; ++k) {
          any_gradient = grad_sum[k] != 0.0f;
        }
        for (size_t k = 0; k < num_params; ++k) {
          velocity[k] = momentum * velocity[k] + grad_sum[k] * inv;
          model.weights[k] -= lr * velocity[k];
        }
        for (float w : model.weights) {
          if (!std::isfinite(w)) {
            throw Error(ErrorCode::kNumericOverflow, "non-finite weight");
          }
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumericOverflow) throw;
      throw Error(
          ErrorCode::kTrainingDiverged,
          fmt::format("training diverged in epoch {}: {}", epoch, e.what()));
    }
    const double mean_loss = loss_sum / static_cast<double>(order.size());
    if (!std::isfinite(mean_loss)) {
      throw Error(
          ErrorCode::kTrainingDiverged,
          fmt::format("training diverged in epoch {}: loss is NaN", epoch));
    }
    // A nonzero loss with every gradient exactly zero means the softmax has
    // saturated past float range; no further step can change the weights.
    if (mean_loss > 0.0 && !any_gradient) {
      throw Error(ErrorCode::kTrainingDiverged,
                  fmt::format("training diverged in epoch {}: loss {} with "
                              "vanished gradients (saturated softmax)",
                              epoch, mean_loss));
    }
    if (on_epoch) on_epoch(EpochStats{epoch, mean_loss});
  }
  return model;
}

}  // namespace causalcam
