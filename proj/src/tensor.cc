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

#include "causalcam/tensor.h"

#include <algorithm>
#include <cmath>

#include "causalcam/error.h"
#include "fmt/core.h"
#include "fmt/ranges.h"

namespace causalcam {

Shape::Shape(std::initializer_list<int> dims) : dims_(dims) {}
Shape::Shape(std::vector<int> dims) : dims_(std::move(dims)) {}

size_t Shape::NumElements() const {
  size_t n = 1;
  for (int d : dims_) n *= static_cast<size_t>(d);
  return n;
}

std::string Shape::ToString() const {
  return fmt::format("({})", fmt::join(dims_, ", "));
}

Tensor::Tensor(Shape shape, float fill)
    : shape_(std::move(shape)), data_(shape_.NumElements(), fill) {}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_.NumElements()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("tensor of shape {} given {} values",
                            shape_.ToString(), data_.size()));
  }
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

void Tensor::Fill(float value) { std::fill(data_.begin(), data_.end(), value); }

}  // namespace causalcam
