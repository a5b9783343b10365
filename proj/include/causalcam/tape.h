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

#ifndef CAUSALCAM_TAPE_H_
#define CAUSALCAM_TAPE_H_

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "causalcam/tensor.h"

namespace causalcam {

enum class OpKind : uint8_t {
  kLeaf,
  kConv2d,
  kRelu,
  kMaxPool2,
  kDense,
  kSoftmax,
  kMse,
  kSelect,
};

std::string_view OpKindName(OpKind kind);

// Handle to a value recorded on a Tape. Only meaningful for the tape that
// created it.
struct Var {
  uint64_t tape_id = 0;
  int index = -1;
};

// Deliberately wrong backward rules, used to prove that gradient checks catch
// broken derivatives. Never set outside tests.
enum class BackwardFault : uint8_t {
  kNone,
  kReluPassThrough,   // Ignores the ReLU gate.
  kMaxPoolBroadcast,  // Sends the window gradient to all four inputs.
};

class Gradients {
 public:
  // Gradient of the backward scalar with respect to `v`, same shape as v.
  // Nodes that do not influence the scalar have all-zero gradients.
  const Tensor& operator[](Var v) const;

 private:
  friend class Tape;
  uint64_t tape_id_ = 0;
  std::vector<Tensor> grads_;
};

// Records one forward pass and replays it in reverse. Not thread-safe; one
// tape per worker.
class Tape {
 public:
  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  uint64_t id() const { return id_; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Input or parameter.
  Var Leaf(Tensor value);

  Var Conv2d(Var x, Var weight, Var bias);
  Var Relu(Var x);
  Var MaxPool2(Var x);
  Var Dense(Var x, Var weight, Var bias);
  Var Softmax(Var x);
  Var Mse(Var x, std::span<const float> target);
  // Element `index` of a flat vector, as shape {1}.
  Var Select(Var x, int index);

  const Tensor& value(Var v) const;
  OpKind kind(Var v) const;

  // Reverse pass from a single-element node. Visits every recorded node once,
  // in reverse recording order, accumulating additively. Throws
  // Error(kForeignNode) if `scalar` belongs to another tape.
  Gradients Backward(Var scalar);

  // Number of Backward calls made on this tape.
  int backward_count() const { return backward_count_; }

  void set_backward_fault_for_testing(BackwardFault fault) { fault_ = fault; }

 private:
  struct Node {
    OpKind kind = OpKind::kLeaf;
    std::array<int, 3> inputs = {-1, -1, -1};
    Tensor value;
    std::vector<uint32_t> argmax;  // kMaxPool2
    std::vector<float> target;     // kMse
    int select_index = -1;         // kSelect
  };

  const Node& node(Var v) const;
  Var Push(Node node);

  uint64_t id_;
  std::vector<Node> nodes_;
  int backward_count_ = 0;
  BackwardFault fault_ = BackwardFault::kNone;
};

}  // namespace causalcam

#endif  // CAUSALCAM_TAPE_H_
