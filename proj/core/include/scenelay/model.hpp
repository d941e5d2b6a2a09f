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

#ifndef SCENELAY_MODEL_HPP_
#define SCENELAY_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scenelay/alignment.hpp"
#include "scenelay/encoders.hpp"
#include "scenelay/nncore.hpp"

namespace scenelay {

// Which textual signal reaches the fusion layer.
enum class InputMode {
  kCaption,              // [v_cap; v_S; v_O]
  kTriplet,              // [v_R; v_S; v_O], no caption encoder
  kCaptionPlusRelation,  // [v_cap; v_R; v_S; v_O]
  kCaptionNoSO,          // [v_cap]
};

std::optional<InputMode> parse_input_mode(std::string_view s);
std::string_view to_string(InputMode m);

struct ModelConfig {
  InputMode mode = InputMode::kCaption;
  EncoderKind encoder = EncoderKind::kAvg;
  std::size_t embed_dim = 300;
  // Width of precomputed caption vectors; only used by kPrecomputed.
  std::size_t precomputed_dim = 0;
  std::size_t caption_width = 300;
  std::size_t fusion_width = 128;
  std::size_t hidden_width = 64;
  std::size_t lstm_hidden = 150;
  // BiLSTM only: learn a copy of the caption-token embeddings.
  bool trainable_embeddings = false;

  bool uses_caption() const { return mode != InputMode::kTriplet; }
  bool uses_subject_object() const { return mode != InputMode::kCaptionNoSO; }
  bool uses_relation() const {
    return mode == InputMode::kTriplet ||
           mode == InputMode::kCaptionPlusRelation;
  }
  std::size_t encoder_width() const;
  std::size_t fusion_input_width() const;
  // Empty when valid, else the reason.
  std::string validate() const;
};

// Trainable copy of the embedding rows used by training captions. Rows are
// keyed by token so checkpoints stay valid across embedding files.
struct EmbeddingLayer {
  std::vector<std::string> tokens;
  Tensor2 weights;
  std::unordered_map<std::string, std::size_t> row_of;

  void rebuild_index();
};

struct ModelParams {
  ModelConfig config;
  LstmParams lstm_left;
  LstmParams lstm_right;
  EmbeddingLayer embedding;
  DenseParams caption;  // W_cap, b_cap
  DenseParams fusion;   // W_c, b_c
  DenseParams hidden;   // W_h, b_h
  DenseParams output;   // W_out, b_out
};

// Zero-valued parameters with the shapes `cfg` implies.
ModelParams make_params(const ModelConfig& cfg);
// Same shapes as `p`, zero-filled; used as a gradient buffer.
ModelParams zeros_like(const ModelParams& p);
void init_params(ModelParams& p, std::uint64_t seed);

// Creates the trainable embedding rows for every caption token of
// `instances` found in `table`, initialized from the table.
void build_embedding_layer(ModelParams& p, std::span<const Instance> instances,
                           const EmbeddingTable& table);

struct Example;
void build_embedding_layer(ModelParams& p, std::span<const Example> examples,
                           const EmbeddingTable& table);

// Flat views in a fixed order: lstm_left.{W,b}, lstm_right.{W,b},
// embedding.weights, caption.{W,b}, fusion.{W,b}, hidden.{W,b},
// output.{W,b}. Arrays a configuration does not use are left out.
std::vector<ParamView> param_views(ModelParams& p);
std::size_t param_count(const ModelParams& p);

// An instance resolved against the embedding table and encoder inputs.
struct Example {
  std::size_t source_index = 0;
  std::string image_id;
  std::vector<std::size_t> caption_rows;  // in-vocabulary tokens, in order
  std::vector<std::string> caption_tokens;  // tokens behind caption_rows
  Vec fixed_caption;  // AVG mean or precomputed vector
  std::size_t subj_row = 0;
  std::size_t obj_row = 0;
  std::size_t rel_row = 0;
  BBox subject;
  BBox target;
};

enum class SkipReason { kOovSubjectObject, kOovRelation, kOovCaption };
std::string_view to_string(SkipReason r);

struct PreparedSet {
  std::vector<Example> examples;
  std::map<std::string, std::size_t> skipped;
};

// Resolves instances for a configuration. Instances whose required tokens are
// OOV are skipped and counted. A caption id missing from `store` is fatal.
PreparedSet prepare_examples(std::span<const Instance> instances,
                             const ModelConfig& cfg,
                             const EmbeddingTable& table,
                             const PrecomputedStore* store = nullptr);

struct ForwardTape {
  BiLstmTape bilstm;
  std::vector<std::size_t> emb_rows;  // embedding-layer row per input, or npos
  Vec c_cap;
  Vec caption_pre;
  Vec v_cap;
  Vec fusion_in;
  Vec fusion_pre;
  Vec z_c;
  Vec hidden_in;
  Vec hidden_pre;
  Vec z_h;
  Vec out;
};

// Predicted [cx, cy, hw, hh]. Pure: identical inputs give identical bits.
Vec forward(const ModelParams& p, const Example& ex,
            const EmbeddingTable& table, ForwardTape* tape = nullptr);

// Accumulates d out / d params (given d loss / d out) into `grad`.
void backward(const ModelParams& p, const Example& ex,
              const EmbeddingTable& table, const ForwardTape& tape,
              std::span<const double> dout, ModelParams& grad);

// Mean batch loss and its gradient accumulated into `grad` (not zeroed).
double loss_and_grad(const ModelParams& p, std::span<const Example> batch,
                     const EmbeddingTable& table, ModelParams& grad);
double batch_loss(const ModelParams& p, std::span<const Example> batch,
                  const EmbeddingTable& table);

struct StepOptions {
  // Global gradient-norm clip; <= 0 disables.
  double clip = 0.0;
};

// One RMSprop update on the mean squared-error loss of `batch`. Returns the
// loss before the update. Throws Error on a non-finite loss.
double train_step(ModelParams& p, RmsProp& opt, std::span<const Example> batch,
                  const EmbeddingTable& table, StepOptions options = {});

struct Prediction {
  std::size_t instance_index = 0;
  std::string image_id;
  BBox pred;
  BBox gold;
  BBox subject;
};

std::vector<Prediction> predict(const ModelParams& p,
                                std::span<const Example> examples,
                                const EmbeddingTable& table);

std::string prediction_to_json(const Prediction& p);
Prediction prediction_from_json(std::string_view line);

}  // namespace scenelay

#endif  // SCENELAY_MODEL_HPP_
