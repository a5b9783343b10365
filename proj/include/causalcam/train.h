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

#ifndef CAUSALCAM_TRAIN_H_
#define CAUSALCAM_TRAIN_H_

#include <cstdint>
#include <functional>
#include <string>

#include "causalcam/dataset.h"
#include "causalcam/model.h"

namespace causalcam {

struct Hyperparams {
  int epochs = 10;
  int batch_size = 16;
  double learning_rate = 0.05;
  double momentum = 0.9;
  uint64_t seed = 7;

  std::string ToJson() const;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
};

// Minibatch SGD with momentum (v = mu * v + g; w -= lr * v) on the MSE
// between softmax(logits) and the one-hot label. Batches follow a per-epoch
// Fisher-Yates shuffle of the training split. Deterministic in
// (arch, data, hp). Throws Error(kTrainingDiverged) naming the epoch when the
// loss or weights become non-finite, or when an epoch with nonzero loss
// produces only exactly-zero gradients.
ModelCheckpoint Train(
    const ArchDescriptor& arch, const DatasetSplit& data, const Hyperparams& hp,
    const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace causalcam

#endif  // CAUSALCAM_TRAIN_H_
