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

#include "causalcam/cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "causalcam/attribution.h"
#include "causalcam/checkpoint.h"
#include "causalcam/dataset.h"
#include "causalcam/error.h"
#include "causalcam/evaluation.h"
#include "causalcam/manifest.h"
#include "causalcam/model.h"
#include "causalcam/train.h"
#include "fmt/core.h"
#include "fmt/ostream.h"
#include "json.hpp"

namespace causalcam::cli {

namespace fs = std::filesystem;

namespace {

constexpr char kRecipeFile[] = "dataset.json";

// Flag combinations CLI11 cannot express; reported with exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenerateFlags {
  std::string out;
  int n = 800;
  int size = 64;
  uint64_t seed = 1;
  double corr = 0.9;
  bool export_pgm = false;
};

struct TrainFlags {
  std::string data;
  std::string arch;
  Hyperparams hp;
  std::string out;
};

struct AttributeFlags {
  std::string model;
  std::string image;
  std::string method;
  std::string target;
  std::string out_pgm;
  std::string out_csv;
};

struct SweepFlags {
  std::string model;
  std::string data;
  std::string method;
  std::string mode = "deletion";
  double tmin = 0.10;
  double tmax = 0.90;
  double tstep = 0.01;
  std::string out;
  int workers = 1;
};

struct TransferFlags {
  std::string source;
  std::string targets;
  std::string data;
  std::string thresholds = "0.1,0.2,0.3,0.4,0.5";
  std::string methods = "gradcam,causal";
  std::string out;
  int workers = 1;
};

struct ReplayFlags {
  std::string manifest;
};

std::vector<std::string> SplitList(const std::string& list) {
  std::vector<std::string> items;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) throw UsageError(fmt::format("empty item in '{}'", list));
    items.push_back(item);
  }
  if (items.empty()) throw UsageError("empty list");
  return items;
}

std::vector<double> ParseThresholds(const std::string& list) {
  std::vector<double> values;
  for (const std::string& item : SplitList(list)) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw UsageError(fmt::format("'{}' is not a number", item));
    }
    values.push_back(v);
  }
  return values;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write {}", path));
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kLoad, fmt::format("{}: cannot open", path));
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// A data directory is either a generator recipe (dataset.json) or a PGM
// folder tree.
DatasetSplit LoadData(const std::string& dir) {
  const fs::path recipe = fs::path(dir) / kRecipeFile;
  if (!fs::exists(recipe)) return LoadFolder(dir);
  GeneratorConfig config;
  try {
    const nlohmann::json j = nlohmann::json::parse(ReadText(recipe.string()));
    const int version = j.at("generator_version").get<int>();
    if (version != kGeneratorVersion) {
      throw Error(ErrorCode::kLoad,
                  fmt::format("{}: generator version {} (this build: {})",
                              recipe.string(), version, kGeneratorVersion));
    }
    config.n = j.at("n").get<int>();
    config.size = j.at("size").get<int>();
    config.seed = j.at("seed").get<uint64_t>();
    config.context_correlation = j.at("context_correlation").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kLoad,
                fmt::format("{}: {}", recipe.string(), e.what()));
  }
  return Generate(config);
}

std::string ModelName(const std::string& path) {
  return fs::path(path).stem().string();
}

void WriteManifest(const std::string& manifest_path,
                   const std::string& subcommand,
                   const std::vector<std::string>& args,
                   std::map<std::string, uint64_t> seeds,
                   const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs) {
  RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.argv = args;
  manifest.seeds = std::move(seeds);
  for (const std::string& p : inputs) {
    manifest.inputs.push_back({p, PathDigest(p)});
  }
  for (const std::string& p : outputs) {
    manifest.outputs.push_back({p, PathDigest(p)});
  }
  manifest.Write(manifest_path);
}

void RunGenerate(const GenerateFlags& f, const std::vector<std::string>& args,
                 std::ostream& out) {
  const GeneratorConfig config{f.n, f.size, f.seed, f.corr};
  const DatasetSplit split = Generate(config);
  fs::create_directories(f.out);
  const nlohmann::json recipe = {{"generator", "causalcam-synthetic"},
                                 {"generator_version", kGeneratorVersion},
                                 {"n", f.n},
                                 {"size", f.size},
                                 {"seed", f.seed},
                                 {"context_correlation", f.corr}};
  const std::string recipe_path = (fs::path(f.out) / kRecipeFile).string();
  WriteText(recipe_path, recipe.dump(2) + "\n");
  std::vector<std::string> outputs = {recipe_path};
  if (f.export_pgm) {
    ExportFolder(split, f.out);
    outputs.push_back(f.out);
  }
  WriteManifest((fs::path(f.out) / "manifest.json").string(), "generate-data",
                args, {{"seed", f.seed}}, {}, outputs);
  fmt::print(out, "generated {} train + {} test images ({}x{}), digest {}\n",
             split.train.size(), split.test.size(), f.size, f.size,
             DatasetDigest(split));
}

void RunTrain(const TrainFlags& f, const std::vector<std::string>& args,
              std::ostream& out, std::ostream& err) {
  const DatasetSplit data = LoadData(f.data);
  if (data.train.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "training split is empty");
  }
  const ArchDescriptor arch =
      ArchDescriptor::ByName(f.arch, data.train.front().image.height);
  const ModelCheckpoint model =
      Train(arch, data, f.hp, [&](const EpochStats& stats) {
        fmt::print(err, "epoch {}/{} loss {:.6f}\n", stats.epoch, f.hp.epochs,
                   stats.mean_loss);
      });
  SaveCheckpoint(model, f.out);
  WriteManifest(f.out + ".manifest.json", "train", args, {{"seed", f.hp.seed}},
                {f.data}, {f.out});
  if (!data.test.empty()) {
    fmt::print(out, "test accuracy {:.6f}\n", Accuracy(model, data.test));
  }
}

void RunAttribute(const AttributeFlags& f, const std::vector<std::string>& args,
                  std::ostream& out) {
  const bool contrast = f.method == "contrast";
  if (contrast && f.target.empty()) {
    throw UsageError("--method contrast requires --target");
  }
  if (!contrast && !f.target.empty()) {
    throw UsageError("--target only applies to --method contrast");
  }
  const ModelCheckpoint model = LoadCheckpoint(f.model);
  const Image image = ReadPgm(f.image);
  const AttributionEngine engine(model);
  AttributionMap map;
  int predicted = 0;
  if (f.method == "gradcam") {
    ImportanceResult r = engine.GradCam(image);
    map = std::move(r.map);
    predicted = r.predicted_class;
  } else if (contrast) {
    const ImportanceKind kind = f.target == "pq" ? ImportanceKind::kContrastPQ
                                : f.target == "notp-notq"
                                    ? ImportanceKind::kContrastNotPNotQ
                                    : ImportanceKind::kContrastPNotP;
    ImportanceResult r = engine.Contrast(image, kind);
    map = std::move(r.map);
    predicted = r.predicted_class;
  } else {
    CausalResult r = engine.Causal(image);
    map = std::move(r.map);
    predicted = r.predicted_class;
  }
  WritePgm(map.values, f.out_pgm);
  WriteMapCsv(map.values, f.out_csv);
  WriteManifest(f.out_pgm + ".manifest.json", "attribute", args, {},
                {f.model, f.image}, {f.out_pgm, f.out_csv});
  fmt::print(out, "{} map, predicted class {}\n", MapKindName(map.kind),
             predicted);
}

void RunSweep(const SweepFlags& f, const std::vector<std::string>& args,
              std::ostream& out) {
  const std::vector<double> thresholds = ThresholdGrid(f.tmin, f.tmax, f.tstep);
  const ModelCheckpoint model = LoadCheckpoint(f.model);
  const DatasetSplit data = LoadData(f.data);
  const EvaluationCurve curve =
      Sweep(model, data.test, ParseMethod(f.method), ParseMaskMode(f.mode),
            thresholds, {f.workers});
  WriteText(f.out, CurveToCsv(std::span(&curve, 1)));
  WriteManifest(f.out + ".manifest.json", "sweep", args, {}, {f.model, f.data},
                {f.out});
  fmt::print(out, "{} {} sweep: {} thresholds over {} test images\n", f.method,
             f.mode, curve.rows.size(), data.test.size());
}

void RunTransfer(const TransferFlags& f, const std::vector<std::string>& args,
                 std::ostream& out) {
  const std::vector<double> thresholds = ParseThresholds(f.thresholds);
  std::vector<Method> methods;
  for (const std::string& m : SplitList(f.methods)) {
    if (m != "gradcam" && m != "causal") {
      throw UsageError(fmt::format("unknown method '{}'", m));
    }
    methods.push_back(ParseMethod(m));
  }
  const std::vector<std::string> target_paths = SplitList(f.targets);

  const ModelCheckpoint source = LoadCheckpoint(f.source);
  std::vector<ModelCheckpoint> target_models;
  target_models.reserve(target_paths.size());
  for (const std::string& p : target_paths) {
    target_models.push_back(LoadCheckpoint(p));
  }
  std::vector<NamedModel> targets;
  for (size_t i = 0; i < target_paths.size(); ++i) {
    targets.push_back({ModelName(target_paths[i]), &target_models[i]});
  }
  const DatasetSplit data = LoadData(f.data);
  const TransferTable table =
      Transfer({ModelName(f.source), &source}, targets, data.test, thresholds,
               methods, {f.workers});
  WriteText(f.out, TransferToCsv(table));

  std::vector<std::string> inputs = {f.source};
  inputs.insert(inputs.end(), target_paths.begin(), target_paths.end());
  inputs.push_back(f.data);
  WriteManifest(f.out + ".manifest.json", "transfer", args, {}, inputs,
                {f.out});
  fmt::print(out, "transfer table: {} accuracy cells, {} ratio cells\n",
             table.accuracies.size(), table.ratios.size());
}

void RunReplay(const ReplayFlags& f, std::ostream& out, std::ostream& err) {
  const RunManifest manifest = RunManifest::Read(f.manifest);
  if (manifest.subcommand == "replay" || manifest.argv.empty() ||
      manifest.argv.front() != manifest.subcommand) {
    throw Error(ErrorCode::kLoad,
                fmt::format("{}: not a replayable manifest", f.manifest));
  }
  for (const ManifestEntry& input : manifest.inputs) {
    if (PathDigest(input.path) != input.sha256) {
      throw Error(
          ErrorCode::kLoad,
          fmt::format("input {} changed since the recorded run", input.path));
    }
  }
  const int code = Dispatch(manifest.argv, out, err);
  if (code != kExitOk) {
    throw Error(ErrorCode::kIo,
                fmt::format("replayed command exited with {}", code));
  }
  for (const ManifestEntry& output : manifest.outputs) {
    if (PathDigest(output.path) != output.sha256) {
      throw Error(
          ErrorCode::kIo,
          fmt::format("output {} differs from the recorded run", output.path));
    }
  }
  fmt::print(out, "replay reproduced {} output(s) bit-exactly\n",
             manifest.outputs.size());
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Causal feature extraction from Grad-CAM via contrastive maps",
               "causalcam"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenerateFlags gen;
  CLI::App* gen_cmd = app.add_subcommand(
      "generate-data", "Write a synthetic cause-vs-context dataset recipe");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--n", gen.n, "Total image count (even)")
      ->capture_default_str();
  gen_cmd->add_option("--size", gen.size, "Image side length (>= 32)")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")
      ->capture_default_str();
  gen_cmd
      ->add_option("--corr", gen.corr,
                   "Probability that the context blob agrees with the "
                   "label, in [0.5, 1]")
      ->capture_default_str();
  gen_cmd->add_flag("--export-pgm", gen.export_pgm,
                    "Also dump images as train/{0,1}, test/{0,1} PGM folders");

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train a classifier, write a CLNS checkpoint");
  train_cmd->add_option("--data", train.data, "Dataset directory")->required();
  train_cmd->add_option("--arch", train.arch, "Architecture")
      ->required()
      ->check(CLI::IsMember({"convnet-s", "convnet-m"}));
  train_cmd->add_option("--epochs", train.hp.epochs, "Epochs")
      ->capture_default_str();
  train_cmd->add_option("--batch", train.hp.batch_size, "Batch size")
      ->capture_default_str();
  train_cmd->add_option("--lr", train.hp.learning_rate, "Learning rate")
      ->capture_default_str();
  train_cmd->add_option("--momentum", train.hp.momentum, "SGD momentum")
      ->capture_default_str();
  train_cmd
      ->add_option("--seed", train.hp.seed,
                   "Seed for initialization and batch order")
      ->capture_default_str();
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();

  AttributeFlags attr;
  CLI::App* attr_cmd =
      app.add_subcommand("attribute", "Compute one attribution map");
  attr_cmd->add_option("--model", attr.model, "CLNS checkpoint")->required();
  attr_cmd->add_option("--image", attr.image, "Input P5 PGM")->required();
  attr_cmd->add_option("--method", attr.method, "Map kind")
      ->required()
      ->check(CLI::IsMember({"gradcam", "contrast", "causal"}));
  attr_cmd
      ->add_option("--target", attr.target,
                   "Contrast target (required with --method contrast)")
      ->check(CLI::IsMember({"pq", "notp-notq", "p-notp"}));
  attr_cmd->add_option("--out-pgm", attr.out_pgm, "Map as 8-bit PGM")
      ->required();
  attr_cmd->add_option("--out-csv", attr.out_csv, "Map as CSV of raw values")
      ->required();

  SweepFlags sweep;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Accuracy vs Huffman ratio over a threshold grid");
  sweep_cmd->add_option("--model", sweep.model, "CLNS checkpoint")->required();
  sweep_cmd->add_option("--data", sweep.data, "Dataset directory (test split)")
      ->required();
  sweep_cmd->add_option("--method", sweep.method, "Map kind")
      ->required()
      ->check(CLI::IsMember({"gradcam", "causal"}));
  sweep_cmd->add_option("--mode", sweep.mode, "Masking mode")
      ->check(CLI::IsMember({"deletion", "insertion"}))
      ->capture_default_str();
  sweep_cmd->add_option("--tmin", sweep.tmin, "First threshold")
      ->capture_default_str();
  sweep_cmd->add_option("--tmax", sweep.tmax, "Last threshold")
      ->capture_default_str();
  sweep_cmd->add_option("--tstep", sweep.tstep, "Threshold step")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Curve CSV")->required();
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  TransferFlags transfer;
  CLI::App* transfer_cmd = app.add_subcommand(
      "transfer", "Evaluate source-model deletion masks on other models");
  transfer_cmd->add_option("--source", transfer.source, "Source checkpoint")
      ->required();
  transfer_cmd
      ->add_option("--targets", transfer.targets,
                   "Comma-separated target checkpoints")
      ->required();
  transfer_cmd
      ->add_option("--data", transfer.data, "Dataset directory (test split)")
      ->required();
  transfer_cmd
      ->add_option("--thresholds", transfer.thresholds,
                   "Comma-separated thresholds")
      ->capture_default_str();
  transfer_cmd
      ->add_option("--methods", transfer.methods, "Comma-separated methods")
      ->capture_default_str();
  transfer_cmd->add_option("--out", transfer.out, "Transfer CSV")->required();
  transfer_cmd->add_option("--workers", transfer.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  ReplayFlags replay;
  CLI::App* replay_cmd = app.add_subcommand(
      "replay", "Re-run a recorded manifest and verify its outputs");
  replay_cmd->add_option("--manifest", replay.manifest, "Manifest JSON")
      ->required();

  std::vector<const char*> argv = {"causalcam"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty()
                ? app.help()
                : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << (app.get_subcommands().empty()
                ? app.help()
                : app.get_subcommands().front()->help());
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) {
      RunGenerate(gen, args, out);
    } else if (train_cmd->parsed()) {
      RunTrain(train, args, out, err);
    } else if (attr_cmd->parsed()) {
      RunAttribute(attr, args, out);
    } else if (sweep_cmd->parsed()) {
      RunSweep(sweep, args, out);
    } else if (transfer_cmd->parsed()) {
      RunTransfer(transfer, args, out);
    } else if (replay_cmd->parsed()) {
      RunReplay(replay, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace causalcam::cli
