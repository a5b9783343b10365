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

#include "causalcam/manifest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "causalcam/digest.h"
#include "causalcam/error.h"
#include "fmt/core.h"
#include "json.hpp"

namespace causalcam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json EntriesToJson(const std::vector<ManifestEntry>& entries) {
  json out = json::array();
  for (const ManifestEntry& e : entries) {
    out.push_back({{"path", e.path}, {"sha256", e.sha256}});
  }
  return out;
}

std::vector<ManifestEntry> EntriesFromJson(const json& j) {
  std::vector<ManifestEntry> out;
  for (const json& e : j) {
    out.push_back(
        {e.at("path").get<std::string>(), e.at("sha256").get<std::string>()});
  }
  return out;
}

bool IsManifest(const fs::path& p) {
  const std::string name = p.filename().string();
  return name == "manifest.json" ||
         (name.size() > 14 &&
          name.compare(name.size() - 14, 14, ".manifest.json") == 0);
}

}  // namespace

std::string RunManifest::ToJson() const {
  const json j = {{"tool", "causalcam"},
                  {"tool_version", tool_version},
                  {"subcommand", subcommand},
                  {"argv", argv},
                  {"seeds", seeds},
                  {"inputs", EntriesToJson(inputs)},
                  {"outputs", EntriesToJson(outputs)}};
  return j.dump(2) + "\n";
}

RunManifest RunManifest::FromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.seeds = j.at("seeds").get<std::map<std::string, uint64_t>>();
    m.inputs = EntriesFromJson(j.at("inputs"));
    m.outputs = EntriesFromJson(j.at("outputs"));
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kLoad, fmt::format("bad manifest: {}", e.what()));
  }
}

void RunManifest::Write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  const std::string text = ToJson();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path));
}

RunManifest RunManifest::Read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kLoad, fmt::format("{}: cannot open", path));
  return FromJson(std::string((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>()));
}

std::string PathDigest(const std::string& path) {
  const fs::path root(path);
  if (!fs::is_directory(root)) return Sha256File(path);
  std::vector<std::string> lines;
  for (const fs::directory_entry& entry :
       fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || IsManifest(entry.path())) continue;
    lines.push_back(fs::relative(entry.path(), root).generic_string() + " " +
                    Sha256File(entry.path().string()));
  }
  std::sort(lines.begin(), lines.end());
  std::string joined;
  for (const std::string& line : lines) joined += line + "\n";
  return Sha256Hex(std::string_view(joined));
}

}  // namespace causalcam::cli
