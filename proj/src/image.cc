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

#include "causalcam/image.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "causalcam/digest.h"
#include "causalcam/error.h"
#include "fmt/core.h"

namespace causalcam {

Image::Image(int h, int w, float fill)
    : height(h), width(w), pixels(static_cast<size_t>(h) * w, fill) {}

Image::Image(int h, int w, std::vector<float> values)
    : height(h), width(w), pixels(std::move(values)) {
  if (pixels.size() != static_cast<size_t>(h) * w) {
    throw Error(
        ErrorCode::kInvalidArgument,
        fmt::format("image {}x{} given {} values", h, w, pixels.size()));
  }
}

std::string ImageDigest(const Image& image) {
  std::string header = fmt::format("{}x{}:", image.height, image.width);
  std::string bytes = header;
  bytes.append(reinterpret_cast<const char*>(image.pixels.data()),
               image.pixels.size() * sizeof(float));
  return Sha256Hex(std::string_view(bytes));
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
bool NextToken(const std::string& bytes, size_t& pos, std::string& token) {
  token.clear();
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  while (pos < bytes.size() &&
         !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    token += bytes[pos++];
  }
  return !token.empty();
}

int ParsePositive(const std::string& token, const std::string& name,
                  const char* field) {
  int value = 0;
  for (char c : token) {
    if (!std::isdigit(static_cast<unsigned char>(c)) || value > 1'000'000) {
      throw Error(ErrorCode::kLoad,
                  fmt::format("{}: malformed PGM {} '{}'", name, field, token));
    }
    value = value * 10 + (c - '0');
  }
  if (value <= 0) {
    throw Error(ErrorCode::kLoad,
                fmt::format("{}: PGM {} must be positive", name, field));
  }
  return value;
}

}  // namespace

Image DecodePgm(const std::string& bytes, const std::string& name) {
  size_t pos = 0;
  std::string token;
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::kLoad,
                fmt::format("{}: not a binary PGM (expected magic P5)", name));
  }
  pos = 2;
  if (!NextToken(bytes, pos, token)) {
    throw Error(ErrorCode::kLoad, fmt::format("{}: missing width", name));
  }
  const int width = ParsePositive(token, name, "width");
  if (!NextToken(bytes, pos, token)) {
    throw Error(ErrorCode::kLoad, fmt::format("{}: missing height", name));
  }
  const int height = ParsePositive(token, name, "height");
  if (!NextToken(bytes, pos, token)) {
    throw Error(ErrorCode::kLoad, fmt::format("{}: missing maxval", name));
  }
  const int maxval = ParsePositive(token, name, "maxval");
  if (maxval != 255) {
    throw Error(
        ErrorCode::kLoad,
        fmt::format("{}: maxval {} unsupported (need 255)", name, maxval));
  }
  // Exactly one whitespace byte separates the header from the raster.
  ++pos;
  const size_t count = static_cast<size_t>(width) * height;
  if (pos > bytes.size() || bytes.size() - pos != count) {
    throw Error(
        ErrorCode::kLoad,
        fmt::format("{}: raster holds {} bytes, expected {}", name,
                    pos > bytes.size() ? 0 : bytes.size() - pos, count));
  }
  Image image(height, width);
  for (size_t i = 0; i < count; ++i) {
    image.pixels[i] =
        static_cast<float>(static_cast<unsigned char>(bytes[pos + i])) / 255.0f;
  }
  return image;
}

Image ReadPgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kLoad, fmt::format("{}: cannot open", path));
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return DecodePgm(bytes, path);
}

std::string EncodePgm(const Image& image) {
  std::string out = fmt::format("P5\n{} {}\n255\n", image.width, image.height);
  out.reserve(out.size() + image.pixels.size());
  for (float v : image.pixels) {
    const float clamped = std::clamp(v, 0.0f, 1.0f);
    out += static_cast<char>(
        static_cast<unsigned char>(std::lround(255.0f * clamped)));
  }
  return out;
}

void WritePgm(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path));
  const std::string bytes = EncodePgm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path));
}

}  // namespace causalcam
