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

#ifndef CAUSALCAM_CHECKPOINT_H_
#define CAUSALCAM_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "causalcam/model.h"

namespace causalcam {

// CLNS checkpoint layout (all integers little-endian):
//   "CLNS"                    4 bytes
//   version                   u32 (kCheckpointVersion)
//   header length             u32
//   header                    UTF-8 JSON: ArchDescriptor plus train_seed and
//                             train_config_digest
//   weights                   IEEE-754 float32, layer order, kernel then bias
inline constexpr uint32_t kCheckpointVersion = 1;

std::string ArchToJson(const ArchDescriptor& arch);

std::string SerializeCheckpoint(const ModelCheckpoint& model);
// Distinct errors: kBadMagic, kVersionMismatch, kTruncated, kCorrupt.
ModelCheckpoint DeserializeCheckpoint(const std::string& bytes);

void SaveCheckpoint(const ModelCheckpoint& model, const std::string& path);
ModelCheckpoint LoadCheckpoint(const std::string& path);

// SHA-256 of the serialized checkpoint.
std::string ModelDigest(const ModelCheckpoint& model);

}  // namespace causalcam

#endif  // CAUSALCAM_CHECKPOINT_H_
