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

#ifndef CAUSALCAM_ERROR_H_
#define CAUSALCAM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace causalcam {

enum class ErrorCode {
  kInvalidArgument,    // Rejected input: shape mismatch, bad parameter value.
  kNumericOverflow,    // A NaN or Inf was produced.
  kForeignNode,        // A Var used with a tape that did not record it.
  kConfiguration,      // Invalid generator / training configuration.
  kLoad,               // Dataset or image could not be loaded.
  kBadMagic,           // Checkpoint magic mismatch.
  kVersionMismatch,    // Checkpoint version not supported.
  kTruncated,          // Checkpoint payload shorter than announced.
  kCorrupt,            // Checkpoint payload inconsistent with its header.
  kTrainingDiverged,   // Loss or weights became non-finite during training.
  kContractViolation,  // Caller broke a documented precondition.
  kIo,                 // Filesystem failure.
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported by throwing an Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace causalcam

#endif  // CAUSALCAM_ERROR_H_
