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

#include "scenelay/checkpoint.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include "json.hpp"

#include "scenelay/error.hpp"

namespace scenelay {
namespace {

Checkpoint sample(EncoderKind enc) {
  Checkpoint ck;
  ck.train.epochs = 3;
  ck.train.lr = 2.5e-4;
  ck.train.lr_decay = 0.97;
  ck.train.seed = 77;
  ck.train.model.encoder = enc;
  ck.train.model.embed_dim = 4;
  ck.train.model.caption_width = 3;
  ck.train.model.fusion_width = 5;
  ck.train.model.hidden_width = 2;
  ck.train.model.lstm_hidden = 2;
  ck.seed = 1234;
  ck.params = make_params(ck.train.model);
  init_params(ck.params, 9);
  for (auto& v : param_views(ck.params)) {
    for (double& x : v.values) x += 1.0 / 3.0;  // not exactly representable
  }
  return ck;
}

void expect_same_params(ModelParams& a, ModelParams& b) {
  auto va = param_views(a), vb = param_views(b);
  ASSERT_EQ(va.size(), vb.size());
  for (std::size_t k = 0; k < va.size(); ++k) {
    EXPECT_EQ(va[k].name, vb[k].name);
    ASSERT_EQ(va[k].values.size(), vb[k].values.size());
    for (std::size_t i = 0; i < va[k].values.size(); ++i) {
      EXPECT_EQ(va[k].values[i], vb[k].values[i]);  // bit-exact
    }
  }
}

TEST(CheckpointTest, RoundTripsExactly) {
  for (auto enc : {EncoderKind::kAvg, EncoderKind::kBiLstm}) {
    auto ck = sample(enc);
    auto back = checkpoint_from_json(checkpoint_to_json(ck));
    EXPECT_EQ(back.seed, 1234u);
    EXPECT_EQ(back.train.epochs, 3u);
    EXPECT_EQ(back.train.lr, 2.5e-4);
    EXPECT_EQ(back.train.lr_decay, 0.97);
    EXPECT_EQ(back.train.model.encoder, enc);
    expect_same_params(ck.params, back.params);
  }
}

TEST(CheckpointTest, TrainableEmbeddingsKeepTokens) {
  auto ck = sample(EncoderKind::kBiLstm);
  ck.train.model.trainable_embeddings = true;
  ck.params.config = ck.train.model;
  ck.params.embedding.tokens = {"a", "b"};
  ck.params.embedding.weights = Tensor2(2, 4);
  ck.params.embedding.weights.data = {1, 2, 3, 4, 5, 6, 7, 8.125};
  ck.params.embedding.rebuild_index();
  auto back = checkpoint_from_json(checkpoint_to_json(ck));
  EXPECT_EQ(back.params.embedding.tokens, ck.params.embedding.tokens);
  EXPECT_EQ(back.params.embedding.row_of.at("b"), 1u);
  expect_same_params(ck.params, back.params);
}

TEST(CheckpointTest, SelfDescribing) {
  auto j = nlohmann::json::parse(checkpoint_to_json(sample(EncoderKind::kAvg)));
  EXPECT_EQ(j["format"], "scenelay-checkpoint");
  EXPECT_EQ(j["version"], kCheckpointVersion);
  EXPECT_EQ(j["train"]["rho"], 0.9);
  EXPECT_EQ(j["model"]["encoder"], "avg");
  EXPECT_EQ(j["params"][0]["name"], "caption.W");
}

TEST(CheckpointTest, RejectsDamage) {
  auto j = nlohmann::json::parse(checkpoint_to_json(sample(EncoderKind::kAvg)));
  auto wrong_version = j;
  wrong_version["version"] = 99;
  EXPECT_THROW(checkpoint_from_json(wrong_version.dump()), Error);
  auto short_array = j;
  short_array["params"][0]["values"].erase(0);
  EXPECT_THROW(checkpoint_from_json(short_array.dump()), Error);
  auto renamed = j;
  renamed["params"][1]["name"] = "bogus";
  EXPECT_THROW(checkpoint_from_json(renamed.dump()), Error);
  EXPECT_THROW(checkpoint_from_json("{}"), Error);
  EXPECT_THROW(checkpoint_from_json("not json"), Error);
}

TEST(CheckpointTest, FileRoundTrip) {
  auto path = std::filesystem::temp_directory_path() / "scenelay_ck_test.json";
  auto ck = sample(EncoderKind::kBiLstm);
  save_checkpoint(ck, path);
  auto back = load_checkpoint(path);
  expect_same_params(ck.params, back.params);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path), Error);
}

}  // namespace
}  // namespace scenelay
