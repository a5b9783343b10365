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

#ifndef CAUSALCAM_OPS_H_
#define CAUSALCAM_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "causalcam/tensor.h"

// Forward and backward kernels for the supported primitives. Both the tape and
// the tape-free inference path call these, so the two routes share arithmetic
// bit for bit. Every reduction accumulates in ascending index order.
namespace causalcam::ops {

// x: (C, H, W); weight: (O, C, k, k) with odd k; bias: (O). Stride 1, zero
// padding of k/2 so the output is (O, H, W). Each output element starts at 0,
// accumulates (c, ky, kx) ascending, then adds the bias.
Tensor Conv2dForward(const Tensor& x, const Tensor& weight, const Tensor& bias);
void Conv2dBackward(const Tensor& x, const Tensor& weight,
                    const Tensor& grad_out, Tensor& grad_x, Tensor& grad_weight,
                    Tensor& grad_bias);

Tensor ReluForward(const Tensor& x);
// Subgradient at exactly 0 is 0.
void ReluBackward(const Tensor& x, const Tensor& grad_out, Tensor& grad_x);

// 2x2 window, stride 2. H and W must be even. `argmax` receives the flat
// input index chosen in each window; ties go to the first in row-major order.
Tensor MaxPool2Forward(const Tensor& x, std::vector<uint32_t>* argmax);
void MaxPool2Backward(std::span<const uint32_t> argmax, const Tensor& grad_out,
                      Tensor& grad_x);

// x: any shape with `in` elements; weight: (out, in); bias: (out).
Tensor DenseForward(const Tensor& x, const Tensor& weight, const Tensor& bias);
void DenseBackward(const Tensor& x, const Tensor& weight,
                   const Tensor& grad_out, Tensor& grad_x, Tensor& grad_weight,
                   Tensor& grad_bias);

// Max-shifted softmax over a flat vector.
Tensor SoftmaxForward(const Tensor& x);
void SoftmaxBackward(const Tensor& y, const Tensor& grad_out, Tensor& grad_x);

// Mean squared error: (1/n) * sum_i (x_i - t_i)^2, returned as shape {1}.
Tensor MseForward(const Tensor& x, std::span<const float> target);
void MseBackward(const Tensor& x, std::span<const float> target, float grad_out,
                 Tensor& grad_x);

}  // namespace causalcam::ops

#endif  // CAUSALCAM_OPS_H_
