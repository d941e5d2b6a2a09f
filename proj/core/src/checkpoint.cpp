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

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scenelay/error.hpp"

namespace scenelay {

using nlohmann::json;

namespace {

json model_json(const ModelConfig& m) {
  return {{"mode", to_string(m.mode)},
          {"encoder", to_string(m.encoder)},
          {"embed_dim", m.embed_dim},
          {"precomputed_dim", m.precomputed_dim},
          {"caption_width", m.caption_width},
          {"fusion_width", m.fusion_width},
          {"hidden_width", m.hidden_width},
          {"lstm_hidden", m.lstm_hidden},
          {"trainable_embeddings", m.trainable_embeddings}};
}

ModelConfig model_from(const json& j) {
  ModelConfig m;
  auto mode = parse_input_mode(j.at("mode").get<std::string>());
  auto enc = parse_encoder_kind(j.at("encoder").get<std::string>());
  if (!mode || !enc) throw Error("checkpoint has unknown mode or encoder");
  m.mode = *mode;
  m.encoder = *enc;
  m.embed_dim = j.at("embed_dim").get<std::size_t>();
  m.precomputed_dim = j.at("precomputed_dim").get<std::size_t>();
  m.caption_width = j.at("caption_width").get<std::size_t>();
  m.fusion_width = j.at("fusion_width").get<std::size_t>();
  m.hidden_width = j.at("hidden_width").get<std::size_t>();
  m.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
  m.trainable_embeddings = j.at("trainable_embeddings").get<bool>();
  return m;
}

json train_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},   {"batch_size", c.batch_size},
          {"lr", c.lr},           {"lr_decay", c.lr_decay},
          {"rho", c.rho},
          {"eps", c.eps},         {"clip", c.clip},
          {"folds", c.folds},     {"seed", c.seed},
          {"group_by_image", c.group_by_image},
          {"model", model_json(c.model)}};
}

TrainConfig train_from(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.lr = j.at("lr").get<double>();
  c.lr_decay = j.value("lr_decay", 1.0);
  c.rho = j.at("rho").get<double>();
  c.eps = j.at("eps").get<double>();
  c.clip = j.value("clip", 0.0);
  c.folds = j.at("folds").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.group_by_image = j.value("group_by_image", false);
  c.model = model_from(j.at("model"));
  return c;
}

}  // namespace

std::string train_config_to_json(const TrainConfig& cfg, int indent) {
  return train_json(cfg).dump(indent);
}

std::string checkpoint_to_json(const Checkpoint& ck) {
  json params = json::array();
  ModelParams& p = const_cast<ModelParams&>(ck.params);
  for (const auto& v : param_views(p)) {
    params.push_back({{"name", v.name},
                      {"size", v.values.size()},
                      {"values", std::vector<double>(v.values.begin(), v.values.end())}});
  }
  json j{{"format", "scenelay-checkpoint"},
         {"version", kCheckpointVersion},
         {"seed", ck.seed},
         {"train", train_json(ck.train)},
         {"model", model_json(ck.params.config)},
         {"embedding_tokens", ck.params.embedding.tokens},
         {"params", params}};
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "scenelay-checkpoint") {
      throw Error("not a scenelay checkpoint");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw Error("unsupported checkpoint version " + j.at("version").dump());
    }
    Checkpoint ck;
    ck.seed = j.at("seed").get<std::uint64_t>();
    ck.train = train_from(j.at("train"));
    ck.params = make_params(model_from(j.at("model")));
    EmbeddingLayer& e = ck.params.embedding;
    e.tokens = j.at("embedding_tokens").get<std::vector<std::string>>();
    e.weights = Tensor2(e.tokens.size(), ck.params.config.embed_dim);
    e.rebuild_index();

    auto views = param_views(ck.params);
    const json& arr = j.at("params");
    if (arr.size() != views.size()) {
      throw Error("checkpoint lists " + std::to_string(arr.size()) +
                  " parameter arrays, configuration needs " +
                  std::to_string(views.size()));
    }
    for (std::size_t i = 0; i < views.size(); ++i) {
      const json& a = arr[i];
      if (a.at("name").get<std::string>() != views[i].name) {
        throw Error("checkpoint parameter " + std::to_string(i) + " is " +
                    a.at("name").get<std::string>() + ", expected " + views[i].name);
      }
      const json& vals = a.at("values");
      if (vals.size() != views[i].values.size()) {
        throw Error("checkpoint parameter " + views[i].name + " has wrong size");
      }
      for (std::size_t k = 0; k < vals.size(); ++k) {
        views[i].values[k] = vals[k].get<double>();
      }
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(ck) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace scenelay
