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

#include "causalcam/evaluation.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "causalcam/checkpoint.h"
#include "causalcam/error.h"
#include "causalcam/huffman.h"
#include "fmt/core.h"

namespace causalcam {

namespace {

// Runs fn(index, engine) for every index in [0, n). Each worker owns one
// engine per model; the first exception is rethrown after all workers stop.
template <typename Fn>
void ParallelFor(size_t n, int workers, const ModelCheckpoint& model, Fn fn) {
  const int count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::atomic<bool> stop{false};
  auto work = [&] {
    const AttributionEngine engine(model);
    while (!stop.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i, engine);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        stop.store(true);
      }
    }
  };
  if (count == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(count);
    for (int w = 0; w < count; ++w) threads.emplace_back(work);
    for (std::thread& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

Image MapFor(const AttributionEngine& engine, const Image& image,
             Method method) {
  switch (method) {
    case Method::kGradCam:
      return engine.GradCam(image).map.values;
    case Method::kCausal:
      return engine.Causal(image).map.values;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

void CheckThresholds(std::span<const double> thresholds) {
  if (thresholds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no thresholds given");
  }
  for (size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= 0.0 && thresholds[i] <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("threshold {} outside [0, 1]", thresholds[i]));
    }
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "thresholds must be strictly ascending");
    }
  }
}

std::string DigestOf(std::span<const LabeledImage> images) {
  DatasetSplit split;
  split.test.assign(images.begin(), images.end());
  return DatasetDigest(split);
}

}  // namespace

std::string_view MaskModeName(MaskMode mode) {
  return mode == MaskMode::kDeletion ? "deletion" : "insertion";
}

std::string_view MethodName(Method method) {
  return method == Method::kGradCam ? "gradcam" : "causal";
}

MaskMode ParseMaskMode(std::string_view name) {
  if (name == "deletion") return MaskMode::kDeletion;
  if (name == "insertion") return MaskMode::kInsertion;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown mask mode '{}'", name));
}

Method ParseMethod(std::string_view name) {
  if (name == "gradcam") return Method::kGradCam;
  if (name == "causal") return Method::kCausal;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown method '{}'", name));
}

Image Binarize(const Image& map, const MaskSpec& spec) {
  Image mask(map.height, map.width);
  for (size_t i = 0; i < map.pixels.size(); ++i) {
    const bool above = static_cast<double>(map.pixels[i]) > spec.threshold;
    const bool keep = spec.mode == MaskMode::kDeletion ? above : !above;
    mask.pixels[i] = keep ? 1.0f : 0.0f;
  }
  return mask;
}

Image Binarize(const AttributionMap& map, const MaskSpec& spec) {
  return Binarize(map.values, spec);
}

Image ApplyMask(const Image& image, const Image& mask) {
  if (!image.SameShape(mask)) {
    throw Error(
        ErrorCode::kInvalidArgument,
        fmt::format("mask {}x{} does not match image {}x{}", mask.height,
                    mask.width, image.height, image.width));
  }
  Image out = image;
  for (size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels[i] *= mask.pixels[i];
  return out;
}

std::vector<double> ThresholdGrid(double min, double max, double step) {
  if (!(step > 0.0) || !(min <= max) || !std::isfinite(max - min)) {
    throw Error(
        ErrorCode::kInvalidArgument,
        fmt::format("bad threshold range [{}, {}] step {}", min, max, step));
  }
  const double steps = (max - min) / step;
  const long long n = std::llround(steps);
  if (std::fabs(steps - static_cast<double>(n)) > 1e-6) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("[{}, {}] is not a whole number of {} steps", min,
                            max, step));
  }
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (long long i = 0; i <= n; ++i) {
    grid.push_back(std::round((min + static_cast<double>(i) * step) * 1e9) /
                   1e9);
  }
  return grid;
}

std::vector<double> DefaultThresholds() {
  return ThresholdGrid(0.10, 0.90, 0.01);
}

EvaluationCurve Sweep(const ModelCheckpoint& model,
                      std::span<const LabeledImage> images, Method method,
                      MaskMode mode, std::span<const double> thresholds,
                      const EvaluationOptions& options) {
  CheckThresholds(thresholds);
  if (images.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep over an empty image set");
  }
  const size_t t_count = thresholds.size();
  std::vector<std::vector<uint8_t>> correct(images.size());
  std::vector<std::vector<double>> ratios(images.size());

  ParallelFor(images.size(), options.workers, model,
              [&](size_t i, const AttributionEngine& engine) {
                const LabeledImage& item = images[i];
                const Image map = MapFor(engine, item.image, method);
                correct[i].resize(t_count);
                ratios[i].resize(t_count);
                for (size_t t = 0; t < t_count; ++t) {
                  const Image masked = ApplyMask(
                      item.image, Binarize(map, {thresholds[t], mode}));
                  correct[i][t] =
                      ArgMax(Logits(model, masked)) == item.label ? 1 : 0;
                  ratios[i][t] = HuffmanRatio(item.image, masked);
                }
              });

  EvaluationCurve curve;
  curve.method = method;
  curve.mode = mode;
  curve.model_digest = ModelDigest(model);
  curve.dataset_digest = DigestOf(images);
  const double n = static_cast<double>(images.size());
  for (size_t t = 0; t < t_count; ++t) {
    size_t hits = 0;
    double ratio_sum = 0.0;
    for (size_t i = 0; i < images.size(); ++i) {
      hits += correct[i][t];
      ratio_sum += ratios[i][t];
    }
    curve.rows.push_back(
        {thresholds[t], ratio_sum / n, static_cast<double>(hits) / n});
  }
  return curve;
}

double TransferTable::Accuracy(std::string_view target, Method method,
                               double threshold) const {
  for (const TransferCell& cell : accuracies) {
    if (cell.target == target && cell.method == method &&
        cell.threshold == threshold) {
      return cell.accuracy;
    }
  }
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("no accuracy cell for ({}, {}, {})", target,
                          MethodName(method), threshold));
}

double TransferTable::Ratio(Method method, double threshold) const {
  for (const TransferRatio& r : ratios) {
    if (r.method == method && r.threshold == threshold) {
      return r.huffman_ratio_mean;
    }
  }
  throw Error(
      ErrorCode::kInvalidArgument,
      fmt::format("no ratio cell for ({}, {})", MethodName(method), threshold));
}

TransferTable Transfer(const NamedModel& source,
                       std::span<const NamedModel> targets,
                       std::span<const LabeledImage> images,
                       std::span<const double> thresholds,
                       std::span<const Method> methods,
                       const EvaluationOptions& options) {
  CheckThresholds(thresholds);
  if (images.empty() || targets.empty() || methods.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "transfer needs images, targets and methods");
  }
  const ModelCheckpoint& src = *source.model;
  for (const NamedModel& target : targets) {
    if (target.model->arch.input_height != src.arch.input_height ||
        target.model->arch.input_width != src.arch.input_width) {
      throw Error(
          ErrorCode::kInvalidArgument,
          fmt::format("target '{}' input shape differs from source '{}'",
                      target.name, source.name));
    }
  }

  const size_t m_count = methods.size();
  const size_t t_count = thresholds.size();
  const size_t g_count = targets.size();
  // Per image: ratio[m][t] and correct[m][t][g], flattened.
  std::vector<std::vector<double>> ratios(images.size());
  std::vector<std::vector<uint8_t>> correct(images.size());

  ParallelFor(
      images.size(), options.workers, src,
      [&](size_t i, const AttributionEngine& engine) {
        const LabeledImage& item = images[i];
        ratios[i].resize(m_count * t_count);
        correct[i].resize(m_count * t_count * g_count);
        for (size_t m = 0; m < m_count; ++m) {
          const Image map = MapFor(engine, item.image, methods[m]);
          for (size_t t = 0; t < t_count; ++t) {
            const Image masked =
                ApplyMask(item.image,
                          Binarize(map, {thresholds[t], MaskMode::kDeletion}));
            ratios[i][m * t_count + t] = HuffmanRatio(item.image, masked);
            for (size_t g = 0; g < g_count; ++g) {
              correct[i][(m * t_count + t) * g_count + g] =
                  ArgMax(Logits(*targets[g].model, masked)) == item.label;
            }
          }
        }
      });

  TransferTable table;
  table.source = source.name;
  table.source_digest = ModelDigest(src);
  for (const NamedModel& target : targets) table.targets.push_back(target.name);
  table.methods.assign(methods.begin(), methods.end());
  table.thresholds.assign(thresholds.begin(), thresholds.end());
  const double n = static_cast<double>(images.size());
  for (size_t t = 0; t < t_count; ++t) {
    for (size_t m = 0; m < m_count; ++m) {
      double ratio_sum = 0.0;
      for (size_t i = 0; i < images.size(); ++i) {
        ratio_sum += ratios[i][m * t_count + t];
      }
      table.ratios.push_back({methods[m], thresholds[t], ratio_sum / n});
      for (size_t g = 0; g < g_count; ++g) {
        size_t hits = 0;
        for (size_t i = 0; i < images.size(); ++i) {
          hits += correct[i][(m * t_count + t) * g_count + g];
        }
        table.accuracies.push_back({targets[g].name, methods[m], thresholds[t],
                                    static_cast<double>(hits) / n});
      }
    }
  }
  return table;
}

std::string CurveToCsv(std::span<const EvaluationCurve> curves) {
  std::string out = "method,mode,threshold,huffman_ratio_mean,accuracy\n";
  for (const EvaluationCurve& curve : curves) {
    for (const CurveRow& row : curve.rows) {
      out += fmt::format("{},{},{:.6f},{:.6f},{:.6f}\n",
                         MethodName(curve.method), MaskModeName(curve.mode),
                         row.threshold, row.huffman_ratio_mean, row.accuracy);
    }
  }
  return out;
}

std::string TransferToCsv(const TransferTable& table) {
  std::string out =
      "source_model,target_model,method,threshold,huffman_ratio_mean,"
      "accuracy\n";
  for (const TransferCell& cell : table.accuracies) {
    out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f}\n", table.source,
                       cell.target, MethodName(cell.method), cell.threshold,
                       table.Ratio(cell.method, cell.threshold), cell.accuracy);
  }
  return out;
}

}  // namespace causalcam
