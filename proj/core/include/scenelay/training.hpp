/* Copyright 2026 The SceneLay Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SCENELAY_TRAINING_HPP_
#define SCENELAY_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scenelay/metrics.hpp"
#include "scenelay/model.hpp"

namespace scenelay {

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  double lr = 1e-4;
  // Per-epoch multiplicative learning-rate factor; 1 keeps it constant.
  double lr_decay = 1.0;
  double rho = 0.9;
  double eps = 1e-8;
  double clip = 0.0;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  bool group_by_image = false;
  std::size_t jobs = 1;
  ModelConfig model;

  std::string validate() const;
};

// Seeded shuffle then contiguous chunks; the first n % k folds get one extra
// element. Throws Error when n < k or k < 2.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed);

// Same, but whole groups (e.g. images) are shuffled and chunked so no group
// spans two folds. `group_of[i]` is the group key of item i.
std::vector<std::vector<std::size_t>> kfold_split_grouped(
    std::span<const std::string> group_of, std::size_t k, std::uint64_t seed);

struct FoldResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // mean per-example loss of each epoch
};

// `seed` drives initialization and per-epoch shuffling. The last partial
// batch is trained on.
FoldResult train_fold(std::span<const Example> train, const TrainConfig& cfg,
                      const EmbeddingTable& table, std::uint64_t seed);

struct FoldOutcome {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  FoldResult result;
  MetricsReport metrics;
  std::vector<Prediction> predictions;
};

struct CrossValidation {
  std::vector<FoldOutcome> folds;
  MetricsReport aggregate;
  std::map<std::string, std::size_t> skipped;
};

// Called after each fold completes (possibly from a worker thread, serialized
// by the harness).
using FoldCallback = std::function<void(const FoldOutcome&)>;

CrossValidation cross_validate(std::span<const Instance> dataset,
                               const TrainConfig& cfg,
                               const EmbeddingTable& table,
                               const PrecomputedStore* store = nullptr,
                               const FoldCallback& on_fold = {});

struct GradCheckOptions {
  EncoderKind encoder = EncoderKind::kAvg;
  InputMode mode = InputMode::kCaption;
  bool trainable_embeddings = false;
  std::uint64_t seed = 1;
  // 0 checks every parameter.
  std::size_t sample = 0;
  double step = 1e-5;
  // Gradients below this magnitude on both sides compare absolutely.
  double floor = 1e-6;
  std::size_t batch = 3;
  // Force every hidden unit dead (large negative hidden bias).
  bool dead_hidden = false;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  std::size_t nonzero_analytic = 0;
};

// Builds a tiny model and batch and compares analytic gradients with
// central finite differences in double precision.
GradCheckReport gradient_check(const GradCheckOptions& opts);

double relative_error(double analytic, double numeric, double floor);

}  // namespace scenelay

#endif  // SCENELAY_TRAINING_HPP_
