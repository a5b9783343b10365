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

#include "causalcam/ops.h"

#include <algorithm>
#include <cmath>

namespace causalcam::ops {

namespace {

// Valid [begin, end) for an index i such that 0 <= i + offset < extent.
struct Range {
  int begin;
  int end;
};

Range ValidRange(int extent, int offset) {
  return {std::max(0, -offset), std::min(extent, extent - offset)};
}

}  // namespace

Tensor Conv2dForward(const Tensor& x, const Tensor& weight,
                     const Tensor& bias) {
  const int channels = x.shape()[0];
  const int height = x.shape()[1];
  const int width = x.shape()[2];
  const int out_channels = weight.shape()[0];
  const int k = weight.shape()[2];
  const int pad = k / 2;
  const size_t plane = static_cast<size_t>(height) * width;

  Tensor out(Shape{out_channels, height, width});
  const float* in = x.data().data();
  const float* w = weight.data().data();
  float* o = out.data().data();
  for (int oc = 0; oc < out_channels; ++oc) {
    float* out_plane = o + oc * plane;
    for (int c = 0; c < channels; ++c) {
      const float* in_plane = in + c * plane;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - pad;
        const Range rows = ValidRange(height, dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const Range cols = ValidRange(width, dx);
          const float wv = w[((oc * channels + c) * k + ky) * k + kx];
          for (int y = rows.begin; y < rows.end; ++y) {
            float* dst = out_plane + y * width;
            const float* src = in_plane + (y + dy) * width + dx;
            for (int xx = cols.begin; xx < cols.end; ++xx) {
              dst[xx] += wv * src[xx];
            }
          }
        }
      }
    }
    const float b = bias[oc];
    for (size_t i = 0; i < plane; ++i) out_plane[i] += b;
  }
  return out;
}

void Conv2dBackward(const Tensor& x, const Tensor& weight,
                    const Tensor& grad_out, Tensor& grad_x, Tensor& grad_weight,
                    Tensor& grad_bias) {
  const int channels = x.shape()[0];
  const int height = x.shape()[1];
  const int width = x.shape()[2];
  const int out_channels = weight.shape()[0];
  const int k = weight.shape()[2];
  const int pad = k / 2;
  const size_t plane = static_cast<size_t>(height) * width;

  const float* in = x.data().data();
  const float* w = weight.data().data();
  const float* g = grad_out.data().data();
  float* gx = grad_x.data().data();
  float* gw = grad_weight.data().data();

  for (int oc = 0; oc < out_channels; ++oc) {
    const float* g_plane = g + oc * plane;
    float sum = 0.0f;
    for (size_t i = 0; i < plane; ++i) sum += g_plane[i];
    grad_bias[oc] += sum;

    for (int c = 0; c < channels; ++c) {
      const float* in_plane = in + c * plane;
      float* gx_plane = gx + c * plane;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - pad;
        const Range rows = ValidRange(height, dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const Range cols = ValidRange(width, dx);
          const size_t widx = ((oc * channels + c) * k + ky) * k + kx;
          const float wv = w[widx];
          float acc = 0.0f;
          for (int y = rows.begin; y < rows.end; ++y) {
            const float* grow = g_plane + y * width;
            const float* src = in_plane + (y + dy) * width + dx;
            for (int xx = cols.begin; xx < cols.end; ++xx) {
              acc += grow[xx] * src[xx];
            }
          }
          gw[widx] += acc;
          for (int y = rows.begin; y < rows.end; ++y) {
            const float* grow = g_plane + y * width;
            float* dst = gx_plane + (y + dy) * width + dx;
            for (int xx = cols.begin; xx < cols.end; ++xx) {
              dst[xx] += wv * grow[xx];
            }
          }
        }
      }
    }
  }
}

Tensor ReluForward(const Tensor& x) {
  Tensor out(x.shape());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0f ? x[i] : 0.0f;
  return out;
}

void ReluBackward(const Tensor& x, const Tensor& grad_out, Tensor& grad_x) {
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0f) grad_x[i] += grad_out[i];
  }
}

Tensor MaxPool2Forward(const Tensor& x, std::vector<uint32_t>* argmax) {
  const int channels = x.shape()[0];
  const int height = x.shape()[1];
  const int width = x.shape()[2];
  const int oh = height / 2;
  const int ow = width / 2;
  Tensor out(Shape{channels, oh, ow});
  if (argmax != nullptr) argmax->assign(out.size(), 0);
  size_t o = 0;
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int xx = 0; xx < ow; ++xx, ++o) {
        const uint32_t base = static_cast<uint32_t>(
            (static_cast<size_t>(c) * height + 2 * y) * width + 2 * xx);
        const uint32_t candidates[4] = {
            base, base + 1, base + static_cast<uint32_t>(width),
            base + static_cast<uint32_t>(width) + 1};
        uint32_t best = candidates[0];
        for (int i = 1; i < 4; ++i) {
          if (x[candidates[i]] > x[best]) best = candidates[i];
        }
        out[o] = x[best];
        if (argmax != nullptr) (*argmax)[o] = best;
      }
    }
  }
  return out;
}

void MaxPool2Backward(std::span<const uint32_t> argmax, const Tensor& grad_out,
                      Tensor& grad_x) {
  for (size_t o = 0; o < argmax.size(); ++o) {
    grad_x[argmax[o]] += grad_out[o];
  }
}

Tensor DenseForward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  const int out_features = weight.shape()[0];
  const int in_features = weight.shape()[1];
  Tensor out(Shape{out_features});
  const float* in = x.data().data();
  for (int i = 0; i < out_features; ++i) {
    const float* row =
        weight.data().data() + static_cast<size_t>(i) * in_features;
    float acc = 0.0f;
    for (int j = 0; j < in_features; ++j) acc += row[j] * in[j];
    out[i] = acc + bias[i];
  }
  return out;
}

void DenseBackward(const Tensor& x, const Tensor& weight,
                   const Tensor& grad_out, Tensor& grad_x, Tensor& grad_weight,
                   Tensor& grad_bias) {
  const int out_features = weight.shape()[0];
  const int in_features = weight.shape()[1];
  for (int i = 0; i < out_features; ++i) {
    const float g = grad_out[i];
    grad_bias[i] += g;
    const size_t row = static_cast<size_t>(i) * in_features;
    for (int j = 0; j < in_features; ++j) {
      grad_weight[row + j] += g * x[j];
      grad_x[j] += weight[row + j] * g;
    }
  }
}

Tensor SoftmaxForward(const Tensor& x) {
  float max = x[0];
  for (size_t i = 1; i < x.size(); ++i) max = std::max(max, x[i]);
  Tensor out(x.shape());
  float sum = 0.0f;
  for (size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - max);
    sum += out[i];
  }
  for (size_t i = 0; i < x.size(); ++i) out[i] /= sum;
  return out;
}

// sum_j (y_i y_j)(g_i - g_j); pair terms cancel exactly across i and j.
void SoftmaxBackward(const Tensor& y, const Tensor& grad_out, Tensor& grad_x) {
  for (size_t i = 0; i < y.size(); ++i) {
    float acc = 0.0f;
    for (size_t j = 0; j < y.size(); ++j) {
      if (j != i) acc += (y[i] * y[j]) * (grad_out[i] - grad_out[j]);
    }
    grad_x[i] += acc;
  }
}

Tensor MseForward(const Tensor& x, std::span<const float> target) {
  float sum = 0.0f;
  for (size_t i = 0; i < x.size(); ++i) {
    const float d = x[i] - target[i];
    sum += d * d;
  }
  return Tensor(Shape{1}, {sum / static_cast<float>(x.size())});
}

void MseBackward(const Tensor& x, std::span<const float> target, float grad_out,
                 Tensor& grad_x) {
  const float scale = 2.0f * grad_out / static_cast<float>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    grad_x[i] += scale * (x[i] - target[i]);
  }
}

}  // namespace causalcam::ops
