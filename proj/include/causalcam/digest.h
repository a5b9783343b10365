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

#ifndef CAUSALCAM_DIGEST_H_
#define CAUSALCAM_DIGEST_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace causalcam {

// Lowercase hex SHA-256.
std::string Sha256Hex(std::span<const uint8_t> bytes);
std::string Sha256Hex(std::string_view bytes);
std::string Sha256Hex(std::span<const float> values);

// SHA-256 of a file's contents. Throws Error(kIo) if unreadable.
std::string Sha256File(const std::string& path);

}  // namespace causalcam

#endif  // CAUSALCAM_DIGEST_H_
