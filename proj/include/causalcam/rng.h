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

#ifndef CAUSALCAM_RNG_H_
#define CAUSALCAM_RNG_H_

#include <cstdint>

namespace causalcam {

// SplitMix64 (Steele, Lea & Flood 2014). Chosen because the algorithm is a
// fixed sequence of 64-bit integer operations, so every platform produces the
// same stream. Independent streams are derived with Derive(seed, stream), which
// makes generation order-independent: image i of a dataset always comes from
// the same stream regardless of how many images precede it.
//
//   state  += 0x9E3779B97F4A7C15
//   z       = state
//   z       = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z       = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output  = z ^ (z >> 31)
//
//   Derive(seed, stream).state = Mix(seed ^ Mix(stream + 0x9E3779B97F4A7C15))
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  static SplitMix64 Derive(uint64_t seed, uint64_t stream);

  // The finalizer used by Next(), exposed for key derivation.
  static uint64_t Mix(uint64_t z);

  uint64_t Next();

  // Uniform in [0, 1) with 24 random bits; exactly representable as float.
  float UniformFloat();
  // Uniform in [0, 1) with 53 random bits.
  double UniformDouble();
  // Uniform in [lo, hi).
  float UniformFloat(float lo, float hi);
  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);
  bool Bernoulli(double p) { return UniformDouble() < p; }

 private:
  uint64_t state_;
};

}  // namespace causalcam

#endif  // CAUSALCAM_RNG_H_
