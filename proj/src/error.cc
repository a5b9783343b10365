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

#include "causalcam/error.h"

namespace causalcam {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid argument";
    case ErrorCode::kNumericOverflow:
      return "numeric overflow";
    case ErrorCode::kForeignNode:
      return "foreign node";
    case ErrorCode::kConfiguration:
      return "configuration error";
    case ErrorCode::kLoad:
      return "load error";
    case ErrorCode::kBadMagic:
      return "bad magic";
    case ErrorCode::kVersionMismatch:
      return "version mismatch";
    case ErrorCode::kTruncated:
      return "truncated";
    case ErrorCode::kCorrupt:
      return "corrupt";
    case ErrorCode::kTrainingDiverged:
      return "training diverged";
    case ErrorCode::kContractViolation:
      return "contract violation";
    case ErrorCode::kIo:
      return "i/o error";
  }
  return "unknown";
}

}  // namespace causalcam
