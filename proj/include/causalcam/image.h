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

#ifndef CAUSALCAM_IMAGE_H_
#define CAUSALCAM_IMAGE_H_

#include <string>
#include <vector>

namespace causalcam {

// Single-channel raster, row-major. Classifier inputs hold values in [0, 1];
// the same type carries attribution maps and masks.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int h, int w, float fill = 0.0f);
  Image(int h, int w, std::vector<float> values);

  float& at(int row, int col) { return pixels[row * width + col]; }
  float at(int row, int col) const { return pixels[row * width + col]; }
  int size() const { return height * width; }
  bool SameShape(const Image& other) const {
    return height == other.height && width == other.width;
  }

  bool operator==(const Image& other) const = default;
};

std::string ImageDigest(const Image& image);

// 8-bit binary PGM (P5, maxval 255).
//
// Reading scales bytes by 1/255. Errors (Error::kLoad) name the file.
Image ReadPgm(const std::string& path);
// Writing stores round(255 * v) after clamping v to [0, 1].
void WritePgm(const Image& image, const std::string& path);
std::string EncodePgm(const Image& image);
Image DecodePgm(const std::string& bytes, const std::string& name_for_errors);

}  // namespace causalcam

#endif  // CAUSALCAM_IMAGE_H_
