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

#include "scenelay/model.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "scenelay/error.hpp"

namespace scenelay {

namespace {

constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kBoxDims = 4;

Vec box_vec(const BBox& b) { return {b.cx, b.cy, b.hw, b.hh}; }

void add_dense_views(std::vector<ParamView>& out, const std::string& name,
                     DenseParams& d) {
  if (d.W.size() == 0) return;
  out.push_back({name + ".W", d.W.data});
  out.push_back({name + ".b", d.b});
}

void add_lstm_views(std::vector<ParamView>& out, const std::string& name,
                    LstmParams& l) {
  if (l.W.size() == 0) return;
  out.push_back({name + ".W", l.W.data});
  out.push_back({name + ".b", l.b});
}

}  // namespace

std::optional<InputMode> parse_input_mode(std::string_view s) {
  if (s == "caption") return InputMode::kCaption;
  if (s == "triplet") return InputMode::kTriplet;
  if (s == "caption+relation" || s == "caption_plus_relation") {
    return InputMode::kCaptionPlusRelation;
  }
  if (s == "caption-so" || s == "caption_no_so") return InputMode::kCaptionNoSO;
  return std::nullopt;
}

std::string_view to_string(InputMode m) {
  switch (m) {
    case InputMode::kCaption: return "caption";
    case InputMode::kTriplet: return "triplet";
    case InputMode::kCaptionPlusRelation: return "caption+relation";
    case InputMode::kCaptionNoSO: return "caption-so";
  }
  return "?";
}

std::string_view to_string(SkipReason r) {
  switch (r) {
    case SkipReason::kOovSubjectObject: return "oov_subject_object";
    case SkipReason::kOovRelation: return "oov_relation";
    case SkipReason::kOovCaption: return "oov_caption";
  }
  return "?";
}

std::size_t ModelConfig::encoder_width() const {
  switch (encoder) {
    case EncoderKind::kAvg: return embed_dim;
    case EncoderKind::kBiLstm: return 2 * lstm_hidden;
    case EncoderKind::kPrecomputed: return precomputed_dim;
  }
  return 0;
}

std::size_t ModelConfig::fusion_input_width() const {
  switch (mode) {
    case InputMode::kCaption: return caption_width + 2 * embed_dim;
    case InputMode::kTriplet: return 3 * embed_dim;
    case InputMode::kCaptionPlusRelation: return caption_width + 3 * embed_dim;
    case InputMode::kCaptionNoSO: return caption_width;
  }
  return 0;
}

std::string ModelConfig::validate() const {
  if (embed_dim == 0) return "embedding dimension must be positive";
  if (fusion_width == 0 || hidden_width == 0) return "layer widths must be positive";
  if (uses_caption() && caption_width == 0) return "caption width must be positive";
  if (mode == InputMode::kTriplet && encoder != EncoderKind::kAvg) {
    return "triplet mode uses no caption encoder; leave --encoder at avg";
  }
  if (encoder == EncoderKind::kBiLstm && lstm_hidden == 0) {
    return "LSTM hidden size must be positive";
  }
  if (encoder == EncoderKind::kPrecomputed && uses_caption() && precomputed_dim == 0) {
    return "precomputed encoder needs a non-empty store";
  }
  if (trainable_embeddings && encoder != EncoderKind::kBiLstm) {
    return "trainable embeddings apply to the bilstm encoder only";
  }
  return {};
}

void EmbeddingLayer::rebuild_index() {
  row_of.clear();
  for (std::size_t i = 0; i < tokens.size(); ++i) row_of.emplace(tokens[i], i);
}

ModelParams make_params(const ModelConfig& cfg) {
  if (auto err = cfg.validate(); !err.empty()) throw Error(err);
  ModelParams p;
  p.config = cfg;
  if (cfg.uses_caption()) {
    if (cfg.encoder == EncoderKind::kBiLstm) {
      p.lstm_left = LstmParams(cfg.embed_dim, cfg.lstm_hidden);
      p.lstm_right = LstmParams(cfg.embed_dim, cfg.lstm_hidden);
    }
    p.caption = DenseParams(cfg.caption_width, cfg.encoder_width());
  }
  p.embedding.weights = Tensor2(0, cfg.embed_dim);
  p.fusion = DenseParams(cfg.fusion_width, cfg.fusion_input_width());
  p.hidden = DenseParams(cfg.hidden_width, cfg.fusion_width + kBoxDims);
  p.output = DenseParams(kBoxDims, cfg.hidden_width);
  return p;
}

ModelParams zeros_like(const ModelParams& p) {
  ModelParams g = make_params(p.config);
  g.embedding.weights = Tensor2(p.embedding.weights.rows, p.embedding.weights.cols);
  return g;
}

void init_params(ModelParams& p, std::uint64_t seed) {
  Rng rng(seed);
  if (p.lstm_left.W.size()) init_lstm(p.lstm_left, rng);
  if (p.lstm_right.W.size()) init_lstm(p.lstm_right, rng);
  if (p.caption.W.size()) init_dense(p.caption, rng);
  init_dense(p.fusion, rng);
  init_dense(p.hidden, rng);
  init_dense(p.output, rng);
}

void build_embedding_layer(ModelParams& p, std::span<const Instance> instances,
                           const EmbeddingTable& table) {
  EmbeddingLayer& e = p.embedding;
  e.tokens.clear();
  e.row_of.clear();
  for (const Instance& inst : instances) {
    for (const auto& tok : inst.tokens) {
      if (e.row_of.count(tok) || !table.contains(tok)) continue;
      e.row_of.emplace(tok, e.tokens.size());
      e.tokens.push_back(tok);
    }
  }
  e.weights = Tensor2(e.tokens.size(), table.dim());
  for (std::size_t r = 0; r < e.tokens.size(); ++r) {
    auto v = *table.lookup(e.tokens[r]);
    std::copy(v.begin(), v.end(), e.weights.row(r).begin());
  }
}

void build_embedding_layer(ModelParams& p, std::span<const Example> examples,
                           const EmbeddingTable& table) {
  EmbeddingLayer& e = p.embedding;
  e.tokens.clear();
  e.row_of.clear();
  for (const Example& ex : examples) {
    for (const auto& tok : ex.caption_tokens) {
      if (e.row_of.count(tok)) continue;
      e.row_of.emplace(tok, e.tokens.size());
      e.tokens.push_back(tok);
    }
  }
  e.weights = Tensor2(e.tokens.size(), table.dim());
  for (std::size_t r = 0; r < e.tokens.size(); ++r) {
    auto v = *table.lookup(e.tokens[r]);
    std::copy(v.begin(), v.end(), e.weights.row(r).begin());
  }
}

std::vector<ParamView> param_views(ModelParams& p) {
  std::vector<ParamView> out;
  add_lstm_views(out, "lstm_left", p.lstm_left);
  add_lstm_views(out, "lstm_right", p.lstm_right);
  if (p.embedding.weights.size()) {
    out.push_back({"embedding.weights", p.embedding.weights.data});
  }
  add_dense_views(out, "caption", p.caption);
  add_dense_views(out, "fusion", p.fusion);
  add_dense_views(out, "hidden", p.hidden);
  add_dense_views(out, "output", p.output);
  return out;
}

std::size_t param_count(const ModelParams& p) {
  std::size_t n = 0;
  for (const auto& v : param_views(const_cast<ModelParams&>(p))) n += v.values.size();
  return n;
}

PreparedSet prepare_examples(std::span<const Instance> instances,
                             const ModelConfig& cfg,
                             const EmbeddingTable& table,
                             const PrecomputedStore* store) {
  if (cfg.embed_dim != table.dim()) {
    throw ShapeError("model expects " + std::to_string(cfg.embed_dim) +
                     "-d embeddings, table has " + std::to_string(table.dim()));
  }
  const bool precomputed =
      cfg.uses_caption() && cfg.encoder == EncoderKind::kPrecomputed;
  if (precomputed) {
    if (!store) throw Error("precomputed encoder requires a store");
    if (store->dim() != cfg.precomputed_dim) {
      throw ShapeError("store vectors have length " + std::to_string(store->dim()) +
                       ", model expects " + std::to_string(cfg.precomputed_dim));
    }
  }
  PreparedSet out;
  auto skip = [&](SkipReason r) { ++out.skipped[std::string(to_string(r))]; };

  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    Example ex;
    ex.source_index = i;
    ex.image_id = inst.image_id;
    ex.subject = inst.subject_box;
    ex.target = inst.object_box;
    if (cfg.uses_subject_object()) {
      auto s = table.index_of(inst.tokens.at(inst.subj_idx));
      auto o = table.index_of(inst.tokens.at(inst.obj_idx));
      if (!s || !o) {
        skip(SkipReason::kOovSubjectObject);
        continue;
      }
      ex.subj_row = *s;
      ex.obj_row = *o;
    }
    if (cfg.uses_relation()) {
      auto r = table.index_of(inst.tokens.at(inst.rel_idx));
      if (!r) {
        skip(SkipReason::kOovRelation);
        continue;
      }
      ex.rel_row = *r;
    }
    if (cfg.uses_caption()) {
      if (precomputed) {
        ex.fixed_caption = encode_precomputed(inst.caption_id(), *store);
      } else {
        for (const auto& tok : inst.tokens) {
          if (auto r = table.index_of(tok)) {
            ex.caption_rows.push_back(*r);
            ex.caption_tokens.push_back(tok);
          }
        }
        if (ex.caption_rows.empty()) {
          skip(SkipReason::kOovCaption);
          continue;
        }
        if (cfg.encoder == EncoderKind::kAvg) {
          ex.fixed_caption = encode_avg(ex.caption_rows, table);
        }
      }
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

Vec forward(const ModelParams& p, const Example& ex,
            const EmbeddingTable& table, ForwardTape* tape) {
  ForwardTape local;
  ForwardTape& t = tape ? *tape : local;
  const ModelConfig& cfg = p.config;

  if (cfg.uses_caption()) {
    if (cfg.encoder == EncoderKind::kBiLstm) {
      std::vector<Vec> inputs;
      inputs.reserve(ex.caption_rows.size());
      t.emb_rows.assign(ex.caption_rows.size(), kNoRow);
      for (std::size_t k = 0; k < ex.caption_rows.size(); ++k) {
        std::span<const double> v = table.row(ex.caption_rows[k]);
        if (cfg.trainable_embeddings) {
          auto it = p.embedding.row_of.find(ex.caption_tokens[k]);
          if (it != p.embedding.row_of.end()) {
            t.emb_rows[k] = it->second;
            v = p.embedding.weights.row(it->second);
          }
        }
        inputs.emplace_back(v.begin(), v.end());
      }
      t.c_cap = encode_bilstm(inputs, p.lstm_left, p.lstm_right, &t.bilstm);
    } else {
      t.c_cap = ex.fixed_caption;
    }
    t.caption_pre = dense(p.caption, t.c_cap);
    t.v_cap = relu(t.caption_pre);
  }

  auto emb = [&](std::size_t row) { return table.row(row); };
  switch (cfg.mode) {
    case InputMode::kCaption:
      t.fusion_in = concat({t.v_cap, emb(ex.subj_row), emb(ex.obj_row)});
      break;
    case InputMode::kTriplet:
      t.fusion_in = concat({emb(ex.rel_row), emb(ex.subj_row), emb(ex.obj_row)});
      break;
    case InputMode::kCaptionPlusRelation:
      t.fusion_in = concat(
          {t.v_cap, emb(ex.rel_row), emb(ex.subj_row), emb(ex.obj_row)});
      break;
    case InputMode::kCaptionNoSO:
      t.fusion_in = t.v_cap;
      break;
  }
  t.fusion_pre = dense(p.fusion, t.fusion_in);
  t.z_c = relu(t.fusion_pre);
  const Vec s = box_vec(ex.subject);
  t.hidden_in = concat({t.z_c, s});
  t.hidden_pre = dense(p.hidden, t.hidden_in);
  t.z_h = relu(t.hidden_pre);
  t.out = dense(p.output, t.z_h);
  return t.out;
}

void backward(const ModelParams& p, const Example& ex,
              const EmbeddingTable& table, const ForwardTape& t,
              std::span<const double> dout, ModelParams& g) {
  (void)ex;
  (void)table;
  const ModelConfig& cfg = p.config;
  Vec dz_h = dense_backward(p.output, t.z_h, dout, g.output);
  Vec dhidden = dense_backward(p.hidden, t.hidden_in,
                               relu_backward(t.hidden_pre, dz_h), g.hidden);
  std::span<const double> dz_c(dhidden.data(), cfg.fusion_width);
  Vec dfusion = dense_backward(p.fusion, t.fusion_in,
                               relu_backward(t.fusion_pre, dz_c), g.fusion);
  if (!cfg.uses_caption()) return;

  std::span<const double> dv_cap(dfusion.data(), cfg.caption_width);
  Vec dc_cap = dense_backward(p.caption, t.c_cap,
                              relu_backward(t.caption_pre, dv_cap), g.caption);
  if (cfg.encoder != EncoderKind::kBiLstm) return;

  std::vector<Vec> dinputs = encode_bilstm_backward(
      p.lstm_left, p.lstm_right, t.bilstm, dc_cap, g.lstm_left, g.lstm_right);
  if (!cfg.trainable_embeddings) return;
  for (std::size_t k = 0; k < dinputs.size(); ++k) {
    if (t.emb_rows[k] == kNoRow) continue;
    auto row = g.embedding.weights.row(t.emb_rows[k]);
    for (std::size_t d = 0; d < row.size(); ++d) row[d] += dinputs[k][d];
  }
}

double loss_and_grad(const ModelParams& p, std::span<const Example> batch,
                     const EmbeddingTable& table, ModelParams& grad) {
  if (batch.empty()) throw Error("empty batch");
  double loss = 0.0;
  ForwardTape tape;
  for (const Example& ex : batch) {
    Vec out = forward(p, ex, table, &tape);
    const Vec target = box_vec(ex.target);
    loss += squared_error(out, target);
    backward(p, ex, table, tape, mse_grad(out, target, batch.size()), grad);
  }
  return loss / static_cast<double>(batch.size());
}

double batch_loss(const ModelParams& p, std::span<const Example> batch,
                  const EmbeddingTable& table) {
  if (batch.empty()) throw Error("empty batch");
  double loss = 0.0;
  for (const Example& ex : batch) {
    loss += squared_error(forward(p, ex, table), box_vec(ex.target));
  }
  return loss / static_cast<double>(batch.size());
}

double train_step(ModelParams& p, RmsProp& opt, std::span<const Example> batch,
                  const EmbeddingTable& table, StepOptions options) {
  ModelParams grad = zeros_like(p);
  const double loss = loss_and_grad(p, batch, table, grad);
  if (!std::isfinite(loss)) throw Error("non-finite loss");
  auto gviews = param_views(grad);
  clip_global_norm(gviews, options.clip);
  opt.step(param_views(p), gviews);
  return loss;
}

std::vector<Prediction> predict(const ModelParams& p,
                                std::span<const Example> examples,
                                const EmbeddingTable& table) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const Example& ex : examples) {
    Vec y = forward(p, ex, table);
    out.push_back({ex.source_index, ex.image_id, BBox{y[0], y[1], y[2], y[3]},
                   ex.target, ex.subject});
  }
  return out;
}

std::string prediction_to_json(const Prediction& p) {
  auto arr = [](const BBox& b) {
    return nlohmann::json::array({b.cx, b.cy, b.hw, b.hh});
  };
  nlohmann::json j{{"image_id", p.image_id},
                   {"instance_index", p.instance_index},
                   {"pred_box", arr(p.pred)},
                   {"gold_box", arr(p.gold)},
                   {"subject_box", arr(p.subject)}};
  return j.dump();
}

Prediction prediction_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    auto box = [](const nlohmann::json& a) {
      if (!a.is_array() || a.size() != 4) throw Error("box must have 4 numbers");
      return BBox{a[0].get<double>(), a[1].get<double>(), a[2].get<double>(),
                  a[3].get<double>()};
    };
    Prediction p;
    const auto& id = j.at("image_id");
    p.image_id = id.is_string() ? id.get<std::string>() : id.dump();
    p.instance_index = j.at("instance_index").get<std::size_t>();
    p.pred = box(j.at("pred_box"));
    p.gold = box(j.at("gold_box"));
    if (!j.contains("subject_box")) {
      throw Error("prediction record lacks subject_box");
    }
    p.subject = box(j.at("subject_box"));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad prediction: ") + e.what());
  }
}

}  // namespace scenelay
