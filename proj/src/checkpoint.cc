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

#include "causalcam/checkpoint.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include "causalcam/digest.h"
#include "causalcam/error.h"
#include "fmt/core.h"
#include "json.hpp"

namespace causalcam {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'C', 'L', 'N', 'S'};

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

uint32_t GetU32(const std::string& in, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(in[pos + i]))
         << (8 * i);
  }
  return v;
}

const char* LayerKindKey(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv:
      return "conv";
    case LayerKind::kRelu:
      return "relu";
    case LayerKind::kMaxPool:
      return "maxpool";
    case LayerKind::kDense:
      return "dense";
  }
  return "unknown";
}

LayerKind ParseLayerKind(const std::string& key) {
  if (key == "conv") return LayerKind::kConv;
  if (key == "relu") return LayerKind::kRelu;
  if (key == "maxpool") return LayerKind::kMaxPool;
  if (key == "dense") return LayerKind::kDense;
  throw Error(ErrorCode::kCorrupt, fmt::format("unknown layer kind '{}'", key));
}

json ArchJson(const ArchDescriptor& arch) {
  json layers = json::array();
  for (const LayerSpec& layer : arch.layers) {
    json l = {{"kind", LayerKindKey(layer.kind)}};
    if (layer.kind == LayerKind::kConv || layer.kind == LayerKind::kDense) {
      l["in"] = layer.in;
      l["out"] = layer.out;
    }
    if (layer.kind == LayerKind::kConv) l["kernel"] = layer.kernel;
    layers.push_back(std::move(l));
  }
  return {{"name", arch.name},
          {"input_height", arch.input_height},
          {"input_width", arch.input_width},
          {"layers", std::move(layers)},
          {"attribution_layer", arch.attribution_layer}};
}

ArchDescriptor ArchFromJson(const json& j) {
  ArchDescriptor arch;
  arch.name = j.at("name").get<std::string>();
  arch.input_height = j.at("input_height").get<int>();
  arch.input_width = j.at("input_width").get<int>();
  arch.attribution_layer = j.at("attribution_layer").get<int>();
  for (const json& l : j.at("layers")) {
    LayerSpec layer;
    layer.kind = ParseLayerKind(l.at("kind").get<std::string>());
    if (layer.kind == LayerKind::kConv || layer.kind == LayerKind::kDense) {
      layer.in = l.at("in").get<int>();
      layer.out = l.at("out").get<int>();
    }
    if (layer.kind == LayerKind::kConv)
      layer.kernel = l.at("kernel").get<int>();
    arch.layers.push_back(layer);
  }
  return arch;
}

}  // namespace

std::string ArchToJson(const ArchDescriptor& arch) {
  return ArchJson(arch).dump();
}

std::string SerializeCheckpoint(const ModelCheckpoint& model) {
  json header = ArchJson(model.arch);
  header["train_seed"] = model.train_seed;
  header["train_config_digest"] = model.train_config_digest;
  const std::string text = header.dump();

  std::string out(kMagic, 4);
  PutU32(out, kCheckpointVersion);
  PutU32(out, static_cast<uint32_t>(text.size()));
  out += text;
  out.reserve(out.size() + 4 * model.weights.size());
  for (float w : model.weights) PutU32(out, std::bit_cast<uint32_t>(w));
  return out;
}

ModelCheckpoint DeserializeCheckpoint(const std::string& bytes) {
  if (bytes.size() < 4) {
    throw Error(ErrorCode::kTruncated, "checkpoint shorter than its magic");
  }
  if (bytes.compare(0, 4, kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic,
                fmt::format("bad checkpoint magic '{}'", bytes.substr(0, 4)));
  }
  if (bytes.size() < 12) {
    throw Error(ErrorCode::kTruncated, "checkpoint header truncated");
  }
  const uint32_t version = GetU32(bytes, 4);
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                fmt::format("checkpoint version {} (supported: {})", version,
                            kCheckpointVersion));
  }
  const uint32_t header_size = GetU32(bytes, 8);
  if (bytes.size() - 12 < header_size) {
    throw Error(ErrorCode::kTruncated, "checkpoint JSON header truncated");
  }

  ModelCheckpoint model;
  try {
    const json header = json::parse(bytes.substr(12, header_size));
    model.arch = ArchFromJson(header);
    model.train_seed = header.at("train_seed").get<uint64_t>();
    model.train_config_digest =
        header.at("train_config_digest").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt,
                fmt::format("checkpoint header: {}", e.what()));
  }
  try {
    model.arch.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorrupt, e.what());
  }

  const size_t expected = model.arch.ParameterCount();
  const size_t payload = bytes.size() - 12 - header_size;
  if (payload < 4 * expected) {
    throw Error(ErrorCode::kTruncated,
                fmt::format("checkpoint holds {} weight bytes, expected {}",
                            payload, 4 * expected));
  }
  if (payload > 4 * expected) {
    throw Error(
        ErrorCode::kCorrupt,
        fmt::format("{} trailing bytes after weights", payload - 4 * expected));
  }
  model.weights.resize(expected);
  size_t pos = 12 + header_size;
  for (size_t i = 0; i < expected; ++i, pos += 4) {
    model.weights[i] = std::bit_cast<float>(GetU32(bytes, pos));
    if (!std::isfinite(model.weights[i])) {
      throw Error(ErrorCode::kCorrupt,
                  fmt::format("weight {} is not finite", i));
    }
  }
  return model;
}

void SaveCheckpoint(const ModelCheckpoint& model, const std::string& path) {
  const std::string bytes = SerializeCheckpoint(model);
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path));
}

ModelCheckpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open {}", path));
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  try {
    return DeserializeCheckpoint(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path, e.what()));
  }
}

std::string ModelDigest(const ModelCheckpoint& model) {
  return Sha256Hex(std::string_view(SerializeCheckpoint(model)));
}

}  // namespace causalcam
