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

#ifndef CAUSALCAM_MANIFEST_H_
#define CAUSALCAM_MANIFEST_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace causalcam::cli {

inline constexpr char kToolVersion[] = "0.1.0";

struct ManifestEntry {
  std::string path;
  std::string sha256;

  bool operator==(const ManifestEntry& other) const = default;
};

// Everything needed to re-run one CLI invocation: its argv, the seeds it
// used, and digests of what it read and wrote. Contains no timestamps, so
// a replay rewrites it byte for byte.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string subcommand;
  std::vector<std::string> argv;  // Without the program name.
  std::map<std::string, uint64_t> seeds;
  std::vector<ManifestEntry> inputs;
  std::vector<ManifestEntry> outputs;

  std::string ToJson() const;
  static RunManifest FromJson(const std::string& text);

  void Write(const std::string& path) const;
  static RunManifest Read(const std::string& path);
};

// SHA-256 of a file, or for a directory, of the sorted (relative path, file
// digest) list of every regular file below it, skipping manifests.
std::string PathDigest(const std::string& path);

}  // namespace causalcam::cli

#endif  // CAUSALCAM_MANIFEST_H_
