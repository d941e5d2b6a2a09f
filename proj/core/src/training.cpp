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

#include "scenelay/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "scenelay/error.hpp"
#include "scenelay/rng.hpp"

namespace scenelay {

std::string TrainConfig::validate() const {
  if (epochs == 0) return "epochs must be positive";
  if (batch_size == 0) return "batch size must be positive";
  if (!(lr >= 0.0) || !std::isfinite(lr)) return "learning rate must be >= 0";
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) return "lr decay must be in (0, 1]";
  if (!(rho > 0.0 && rho < 1.0)) return "rho must be in (0, 1)";
  if (!(eps > 0.0)) return "epsilon must be positive";
  if (folds < 2) return "folds must be at least 2";
  if (jobs == 0) return "jobs must be positive";
  return model.validate();
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k,
                                                  std::uint64_t seed) {
  if (k < 2) throw Error("k-fold split needs k >= 2");
  if (n < k) {
    throw Error("cannot split " + std::to_string(n) + " items into " +
                std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return folds;
}

std::vector<std::vector<std::size_t>> kfold_split_grouped(
    std::span<const std::string> group_of, std::size_t k, std::uint64_t seed) {
  std::vector<std::string> groups;
  std::unordered_map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < group_of.size(); ++i) {
    auto [it, inserted] = members.try_emplace(group_of[i]);
    if (inserted) groups.push_back(group_of[i]);
    it->second.push_back(i);
  }
  const auto group_folds = kfold_split(groups.size(), k, seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t g : group_folds[f]) {
      const auto& m = members[groups[g]];
      folds[f].insert(folds[f].end(), m.begin(), m.end());
    }
  }
  return folds;
}

FoldResult train_fold(std::span<const Example> train, const TrainConfig& cfg,
                      const EmbeddingTable& table, std::uint64_t seed) {
  if (train.empty()) throw Error("empty training set");
  if (auto err = cfg.validate(); !err.empty()) throw Error(err);

  FoldResult out;
  out.params = make_params(cfg.model);
  init_params(out.params, derive_seed(seed, 0));
  if (cfg.model.trainable_embeddings) {
    build_embedding_layer(out.params, train, table);
  }
  RmsProp opt({cfg.lr, cfg.rho, cfg.eps});
  Rng rng(derive_seed(seed, 1));
  std::vector<Example> data(train.begin(), train.end());
  const std::size_t n = data.size();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.set_lr(cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(epoch)));
    rng.shuffle(std::span<Example>(data));
    double total = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      std::span<const Example> batch(data.data() + start, len);
      double loss;
      try {
        loss = train_step(out.params, opt, batch, table, {cfg.clip});
      } catch (const Error& e) {
        throw Error("epoch " + std::to_string(epoch) + " batch " +
                    std::to_string(batch_index) + ": " + e.what());
      }
      total += loss * static_cast<double>(len);
    }
    out.epoch_loss.push_back(total / static_cast<double>(n));
  }
  return out;
}

CrossValidation cross_validate(std::span<const Instance> dataset,
                               const TrainConfig& cfg,
                               const EmbeddingTable& table,
                               const PrecomputedStore* store,
                               const FoldCallback& on_fold) {
  if (auto err = cfg.validate(); !err.empty()) throw Error(err);
  PreparedSet prepared = prepare_examples(dataset, cfg.model, table, store);
  const auto& examples = prepared.examples;
  if (examples.size() < cfg.folds) {
    throw Error("dataset has " + std::to_string(examples.size()) +
                " usable instances, fewer than " + std::to_string(cfg.folds) +
                " folds");
  }

  std::vector<std::vector<std::size_t>> splits;
  if (cfg.group_by_image) {
    std::vector<std::string> groups;
    for (const auto& ex : examples) groups.push_back(ex.image_id);
    splits = kfold_split_grouped(groups, cfg.folds, cfg.seed);
  } else {
    splits = kfold_split(examples.size(), cfg.folds, cfg.seed);
  }

  CrossValidation cv;
  cv.skipped = prepared.skipped;
  cv.folds.resize(cfg.folds);
  std::mutex callback_mutex;

  auto run_fold = [&](std::size_t f) {
    std::vector<bool> in_test(examples.size(), false);
    for (std::size_t i : splits[f]) in_test[i] = true;
    std::vector<Example> train, test;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      (in_test[i] ? test : train).push_back(examples[i]);
    }
    FoldOutcome& o = cv.folds[f];
    o.fold = f;
    o.train_size = train.size();
    o.test_size = test.size();
    o.result = train_fold(train, cfg, table, derive_seed(cfg.seed, 1000 + f));
    o.predictions = predict(o.result.params, test, table);
    std::vector<EvalRecord> records;
    for (const auto& p : o.predictions) records.push_back({p.pred, p.gold, p.subject});
    o.metrics = evaluate(records);
    if (on_fold) {
      std::lock_guard<std::mutex> lock(callback_mutex);
      on_fold(o);
    }
  };

  const std::size_t jobs = std::min(cfg.jobs, cfg.folds);
  if (jobs <= 1) {
    for (std::size_t f = 0; f < cfg.folds; ++f) run_fold(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t f = next++; f < cfg.folds; f = next++) {
          try {
            run_fold(f);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<MetricsReport> per_fold;
  for (const auto& o : cv.folds) per_fold.push_back(o.metrics);
  cv.aggregate = aggregate(per_fold);
  return cv;
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

EmbeddingTable random_table(std::size_t dim, std::size_t vocab, Rng& rng) {
  EmbeddingTable table(dim);
  Vec v(dim);
  for (std::size_t i = 0; i < vocab; ++i) {
    for (double& x : v) x = rng.normal();
    table.add("w" + std::to_string(i), v);
  }
  return table;
}

void randomize(std::span<double> values, Rng& rng, double scale) {
  for (double& v : values) v = rng.uniform(-scale, scale);
}

}  // namespace

GradCheckReport gradient_check(const GradCheckOptions& opts) {
  Rng rng(opts.seed);
  constexpr std::size_t kDim = 5;
  constexpr std::size_t kVocab = 10;
  EmbeddingTable table = random_table(kDim, kVocab, rng);

  ModelConfig cfg;
  cfg.mode = opts.mode;
  cfg.encoder = opts.encoder;
  cfg.embed_dim = kDim;
  cfg.precomputed_dim = 6;
  cfg.caption_width = 4;
  cfg.fusion_width = 5;
  cfg.hidden_width = 4;
  cfg.lstm_hidden = 3;
  cfg.trainable_embeddings = opts.trainable_embeddings;
  if (auto err = cfg.validate(); !err.empty()) throw Error(err);

  std::vector<Instance> instances;
  PrecomputedStore store;
  for (std::size_t b = 0; b < std::max<std::size_t>(1, opts.batch); ++b) {
    Instance inst;
    inst.image_id = "img" + std::to_string(b);
    const std::size_t len = 3 + rng.below(3);
    for (std::size_t t = 0; t < len; ++t) {
      inst.tokens.push_back("w" + std::to_string(rng.below(kVocab)));
    }
    inst.subj_idx = 0;
    inst.rel_idx = 1;
    inst.obj_idx = 2;
    inst.scores.caption_index = 0;
    inst.subject_box = {rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8),
                        rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.2)};
    inst.object_box = {rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8),
                       rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.2)};
    Vec v(cfg.precomputed_dim);
    randomize(v, rng, 1.0);
    store.add(inst.caption_id(), v);
    instances.push_back(std::move(inst));
  }
  PreparedSet prepared = prepare_examples(instances, cfg, table, &store);
  const std::vector<Example>& batch = prepared.examples;

  ModelParams p = make_params(cfg);
  if (cfg.trainable_embeddings) build_embedding_layer(p, batch, table);
  for (auto& view : param_views(p)) randomize(view.values, rng, 0.6);
  if (opts.dead_hidden) std::fill(p.hidden.b.begin(), p.hidden.b.end(), -100.0);

  ModelParams grad = zeros_like(p);
  loss_and_grad(p, batch, table, grad);

  auto pviews = param_views(p);
  auto gviews = param_views(grad);
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t v = 0; v < pviews.size(); ++v) {
    for (std::size_t k = 0; k < pviews[v].values.size(); ++k) coords.emplace_back(v, k);
  }
  if (opts.sample > 0 && opts.sample < coords.size()) {
    rng.shuffle(std::span(coords));
    coords.resize(opts.sample);
  }

  GradCheckReport rep;
  for (auto [v, k] : coords) {
    double& theta = pviews[v].values[k];
    const double saved = theta;
    theta = saved + opts.step;
    const double up = batch_loss(p, batch, table);
    theta = saved - opts.step;
    const double down = batch_loss(p, batch, table);
    theta = saved;
    const double numeric = (up - down) / (2.0 * opts.step);
    const double analytic = gviews[v].values[k];
    const double err = relative_error(analytic, numeric, opts.floor);
    ++rep.checked;
    if (analytic != 0.0) ++rep.nonzero_analytic;
    if (err > rep.max_rel_error || rep.worst_param.empty()) {
      rep.max_rel_error = std::max(rep.max_rel_error, err);
      rep.worst_param = pviews[v].name + "[" + std::to_string(k) + "]";
      rep.worst_analytic = analytic;
      rep.worst_numeric = numeric;
    }
  }
  return rep;
}

}  // namespace scenelay
