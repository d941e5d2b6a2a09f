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

#include <benchmark/benchmark.h>

#include <vector>

#include "scenelay/alignment.hpp"
#include "scenelay/geometry.hpp"
#include "scenelay/model.hpp"
#include "scenelay/rng.hpp"
#include "scenelay/synthetic.hpp"

namespace scenelay {
namespace {

// Synthetic corpus at full embedding width so layer sizes match real runs.
struct Fixture {
  SyntheticCorpus corpus;
  std::vector<Instance> instances;

  Fixture() : corpus(make_synthetic_corpus({256, 300, 7})) {
    AlignmentConfig cfg;
    cfg.banned_actions = default_banned_actions();
    instances = build_dataset(corpus.triplets, corpus.captions, corpus.table, cfg).instances;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

ModelConfig config_for(EncoderKind enc) {
  ModelConfig c;
  c.encoder = enc;
  c.embed_dim = 300;
  return c;
}

void BM_Forward(benchmark::State& state) {
  const auto& f = fixture();
  const auto cfg = config_for(static_cast<EncoderKind>(state.range(0)));
  auto p = make_params(cfg);
  init_params(p, 1);
  const auto prep = prepare_examples(f.instances, cfg, f.corpus.table);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(p, prep.examples[i++ % prep.examples.size()], f.corpus.table));
  }
  state.SetLabel(std::string(to_string(cfg.encoder)));
}

void BM_LossAndGrad(benchmark::State& state) {
  const auto& f = fixture();
  const auto cfg = config_for(static_cast<EncoderKind>(state.range(0)));
  auto p = make_params(cfg);
  init_params(p, 1);
  auto grad = zeros_like(p);
  const auto prep = prepare_examples(f.instances, cfg, f.corpus.table);
  const std::span<const Example> batch(prep.examples.data(), 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grad(p, batch, f.corpus.table, grad));
  }
  state.SetItemsProcessed(state.iterations() * 64);
  state.SetLabel(std::string(to_string(cfg.encoder)));
}

BENCHMARK(BM_Forward)
    ->Arg(static_cast<int>(EncoderKind::kAvg))
    ->Arg(static_cast<int>(EncoderKind::kBiLstm));
BENCHMARK(BM_LossAndGrad)
    ->Arg(static_cast<int>(EncoderKind::kAvg))
    ->Arg(static_cast<int>(EncoderKind::kBiLstm));

void BM_Iou(benchmark::State& state) {
  Rng rng(3);
  std::vector<BBox> boxes(1024);
  for (auto& b : boxes) {
    b = {rng.uniform(), rng.uniform(), rng.uniform(0, 0.3), rng.uniform(0, 0.3)};
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(iou(boxes[i % 1024], boxes[(i * 7 + 1) % 1024]));
    ++i;
  }
}
BENCHMARK(BM_Iou);

void BM_BestToken(benchmark::State& state) {
  const auto& f = fixture();
  const auto term = f.corpus.table.lookup("person");
  const auto& caption = f.instances.front().tokens;
  for (auto _ : state) {
    benchmark::DoNotOptimize(best_token(*term, caption, f.corpus.table));
  }
}
BENCHMARK(BM_BestToken);

void BM_BuildDataset(benchmark::State& state) {
  const auto& f = fixture();
  AlignmentConfig cfg;
  cfg.banned_actions = default_banned_actions();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_dataset(f.corpus.triplets, f.corpus.captions, f.corpus.table, cfg).report);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.corpus.triplets.size()));
}
BENCHMARK(BM_BuildDataset);

}  // namespace
}  // namespace scenelay

BENCHMARK_MAIN();
