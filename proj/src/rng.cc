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

#include "causalcam/rng.h"

namespace causalcam {

namespace {
constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}  // namespace

uint64_t SplitMix64::Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

SplitMix64 SplitMix64::Derive(uint64_t seed, uint64_t stream) {
  return SplitMix64(Mix(seed ^ Mix(stream + kGolden)));
}

uint64_t SplitMix64::Next() {
  state_ += kGolden;
  return Mix(state_);
}

float SplitMix64::UniformFloat() {
  return static_cast<float>(Next() >> 40) * 0x1.0p-24f;
}

double SplitMix64::UniformDouble() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

float SplitMix64::UniformFloat(float lo, float hi) {
  return lo + (hi - lo) * UniformFloat();
}

uint64_t SplitMix64::UniformInt(uint64_t n) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(Next()) * n) >>
                               64);
}

}  // namespace causalcam
