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

#include "causalcam/tape.h"

#include <atomic>
#include <utility>

#include "causalcam/error.h"
#include "causalcam/ops.h"
#include "fmt/core.h"

namespace causalcam {

namespace {

std::atomic<uint64_t> next_tape_id{1};

void CheckFinite(const Tensor& t, OpKind kind) {
  if (!t.AllFinite()) {
    throw Error(
        ErrorCode::kNumericOverflow,
        fmt::format("{} produced a non-finite value", OpKindName(kind)));
  }
}

[[noreturn]] void ShapeError(OpKind kind, const std::string& detail) {
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("{}: {}", OpKindName(kind), detail));
}

}  // namespace

std::string_view OpKindName(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf:
      return "leaf";
    case OpKind::kConv2d:
      return "conv2d";
    case OpKind::kRelu:
      return "relu";
    case OpKind::kMaxPool2:
      return "maxpool2";
    case OpKind::kDense:
      return "dense";
    case OpKind::kSoftmax:
      return "softmax";
    case OpKind::kMse:
      return "mse";
    case OpKind::kSelect:
      return "select";
  }
  return "unknown";
}

const Tensor& Gradients::operator[](Var v) const {
  if (v.tape_id != tape_id_ || v.index < 0 ||
      v.index >= static_cast<int>(grads_.size())) {
    throw Error(ErrorCode::kForeignNode,
                "gradient requested for a node of another tape");
  }
  return grads_[v.index];
}

Tape::Tape() : id_(next_tape_id.fetch_add(1)) {}

const Tape::Node& Tape::node(Var v) const {
  if (v.tape_id != id_ || v.index < 0 || v.index >= size()) {
    throw Error(
        ErrorCode::kForeignNode,
        fmt::format("node {} does not belong to tape {}", v.index, id_));
  }
  return nodes_[v.index];
}

const Tensor& Tape::value(Var v) const { return node(v).value; }
OpKind Tape::kind(Var v) const { return node(v).kind; }

Var Tape::Push(Node n) {
  CheckFinite(n.value, n.kind);
  nodes_.push_back(std::move(n));
  return Var{id_, size() - 1};
}

Var Tape::Leaf(Tensor value) {
  Node n;
  n.kind = OpKind::kLeaf;
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Tape::Conv2d(Var x, Var weight, Var bias) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(weight);
  const Tensor& bv = value(bias);
  if (xv.shape().rank() != 3)
    ShapeError(OpKind::kConv2d, "input must be (C, H, W)");
  if (wv.shape().rank() != 4 || wv.shape()[1] != xv.shape()[0] ||
      wv.shape()[2] != wv.shape()[3] || wv.shape()[2] % 2 == 0) {
    ShapeError(OpKind::kConv2d,
               fmt::format("weight {} incompatible with input {}",
                           wv.shape().ToString(), xv.shape().ToString()));
  }
  if (bv.shape() != Shape{wv.shape()[0]}) {
    ShapeError(OpKind::kConv2d, "bias must have one entry per output channel");
  }
  Node n;
  n.kind = OpKind::kConv2d;
  n.inputs = {x.index, weight.index, bias.index};
  n.value = ops::Conv2dForward(xv, wv, bv);
  return Push(std::move(n));
}

Var Tape::Relu(Var x) {
  Node n;
  n.kind = OpKind::kRelu;
  n.inputs = {x.index, -1, -1};
  n.value = ops::ReluForward(value(x));
  return Push(std::move(n));
}

Var Tape::MaxPool2(Var x) {
  const Tensor& xv = value(x);
  if (xv.shape().rank() != 3 || xv.shape()[1] % 2 != 0 ||
      xv.shape()[2] % 2 != 0) {
    ShapeError(OpKind::kMaxPool2,
               fmt::format("input {} must be (C, even H, even W)",
                           xv.shape().ToString()));
  }
  Node n;
  n.kind = OpKind::kMaxPool2;
  n.inputs = {x.index, -1, -1};
  n.value = ops::MaxPool2Forward(xv, &n.argmax);
  return Push(std::move(n));
}

Var Tape::Dense(Var x, Var weight, Var bias) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(weight);
  const Tensor& bv = value(bias);
  if (wv.shape().rank() != 2 ||
      static_cast<size_t>(wv.shape()[1]) != xv.size()) {
    ShapeError(OpKind::kDense,
               fmt::format("weight {} incompatible with {} inputs",
                           wv.shape().ToString(), xv.size()));
  }
  if (bv.shape() != Shape{wv.shape()[0]}) {
    ShapeError(OpKind::kDense, "bias must have one entry per output");
  }
  Node n;
  n.kind = OpKind::kDense;
  n.inputs = {x.index, weight.index, bias.index};
  n.value = ops::DenseForward(xv, wv, bv);
  return Push(std::move(n));
}

Var Tape::Softmax(Var x) {
  const Tensor& xv = value(x);
  if (xv.size() == 0) ShapeError(OpKind::kSoftmax, "empty input");
  Node n;
  n.kind = OpKind::kSoftmax;
  n.inputs = {x.index, -1, -1};
  n.value = ops::SoftmaxForward(
      Tensor(Shape{static_cast<int>(xv.size())},
             std::vector<float>(xv.data().begin(), xv.data().end())));
  return Push(std::move(n));
}

Var Tape::Mse(Var x, std::span<const float> target) {
  const Tensor& xv = value(x);
  if (xv.size() != target.size() || xv.size() == 0) {
    ShapeError(OpKind::kMse,
               fmt::format("target of length {} for input of {} values",
                           target.size(), xv.size()));
  }
  Node n;
  n.kind = OpKind::kMse;
  n.inputs = {x.index, -1, -1};
  n.target.assign(target.begin(), target.end());
  n.value = ops::MseForward(xv, n.target);
  return Push(std::move(n));
}

Var Tape::Select(Var x, int index) {
  const Tensor& xv = value(x);
  if (index < 0 || static_cast<size_t>(index) >= xv.size()) {
    ShapeError(
        OpKind::kSelect,
        fmt::format("index {} out of range for {} values", index, xv.size()));
  }
  Node n;
  n.kind = OpKind::kSelect;
  n.inputs = {x.index, -1, -1};
  n.select_index = index;
  n.value = Tensor(Shape{1}, {xv[index]});
  return Push(std::move(n));
}

Gradients Tape::Backward(Var scalar) {
  const Node& root = node(scalar);
  if (root.value.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("backward needs a scalar, got shape {}",
                            root.value.shape().ToString()));
  }
  ++backward_count_;

  Gradients result;
  result.tape_id_ = id_;
  result.grads_.reserve(nodes_.size());
  for (const Node& n : nodes_) result.grads_.emplace_back(n.value.shape());
  std::vector<Tensor>& grads = result.grads_;
  grads[scalar.index][0] = 1.0f;

  for (int i = scalar.index; i >= 0; --i) {
    const Node& n = nodes_[i];
    const Tensor& g = grads[i];
    switch (n.kind) {
      case OpKind::kLeaf:
        break;
      case OpKind::kConv2d:
        ops::Conv2dBackward(nodes_[n.inputs[0]].value,
                            nodes_[n.inputs[1]].value, g, grads[n.inputs[0]],
                            grads[n.inputs[1]], grads[n.inputs[2]]);
        break;
      case OpKind::kRelu:
        if (fault_ == BackwardFault::kReluPassThrough) {
          Tensor& gx = grads[n.inputs[0]];
          for (size_t j = 0; j < g.size(); ++j) gx[j] += g[j];
        } else {
          ops::ReluBackward(nodes_[n.inputs[0]].value, g, grads[n.inputs[0]]);
        }
        break;
      case OpKind::kMaxPool2:
        if (fault_ == BackwardFault::kMaxPoolBroadcast) {
          const int width = nodes_[n.inputs[0]].value.shape()[2];
          Tensor& gx = grads[n.inputs[0]];
          for (size_t o = 0; o < n.argmax.size(); ++o) {
            // argmax lies in the window; recover its top-left corner.
            const uint32_t a = n.argmax[o];
            const uint32_t row = a / width;
            const uint32_t col = a % width;
            const uint32_t base = (row & ~1u) * width + (col & ~1u);
            gx[base] += g[o];
            gx[base + 1] += g[o];
            gx[base + width] += g[o];
            gx[base + width + 1] += g[o];
          }
        } else {
          ops::MaxPool2Backward(n.argmax, g, grads[n.inputs[0]]);
        }
        break;
      case OpKind::kDense:
        ops::DenseBackward(nodes_[n.inputs[0]].value, nodes_[n.inputs[1]].value,
                           g, grads[n.inputs[0]], grads[n.inputs[1]],
                           grads[n.inputs[2]]);
        break;
      case OpKind::kSoftmax:
        ops::SoftmaxBackward(n.value, g, grads[n.inputs[0]]);
        break;
      case OpKind::kMse:
        ops::MseBackward(nodes_[n.inputs[0]].value, n.target, g[0],
                         grads[n.inputs[0]]);
        break;
      case OpKind::kSelect:
        grads[n.inputs[0]][n.select_index] += g[0];
        break;
    }
  }
  for (int i = 0; i < size(); ++i) {
    if (!grads[i].AllFinite()) {
      throw Error(ErrorCode::kNumericOverflow,
                  fmt::format("non-finite gradient at {} node {}",
                              OpKindName(nodes_[i].kind), i));
    }
  }
  return result;
}

}  // namespace causalcam
