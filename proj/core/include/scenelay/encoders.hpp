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

#ifndef SCENELAY_ENCODERS_HPP_
#define SCENELAY_ENCODERS_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "scenelay/alignment.hpp"
#include "scenelay/embeddings.hpp"
#include "scenelay/nncore.hpp"

namespace scenelay {

enum class EncoderKind { kAvg, kBiLstm, kPrecomputed };

std::optional<EncoderKind> parse_encoder_kind(std::string_view s);
std::string_view to_string(EncoderKind k);

// Externally computed sentence vectors keyed by caption id. Read-only.
class PrecomputedStore {
 public:
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  void add(std::string caption_id, Vec v);
  // Throws Error naming the id when it is missing.
  const Vec& at(std::string_view caption_id) const;
  bool contains(std::string_view caption_id) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Vec> vectors_;
};

// JSON Lines `{"caption_id": string, "vector": [floats]}`.
PrecomputedStore load_store(const std::filesystem::path& path);
PrecomputedStore parse_store(std::istream& in);

// Mean of the in-vocabulary token embeddings. Throws Error when every token
// is OOV.
Vec encode_avg(const Tokens& tokens, const EmbeddingTable& table);
Vec encode_avg(std::span<const std::size_t> rows, const EmbeddingTable& table);

// Left LSTM over the sequence, right LSTM over its reverse; returns
// [h_N^L; h_N^R]. OOV tokens are dropped from the sequence.
Vec encode_bilstm(const Tokens& tokens, const EmbeddingTable& table,
                  const LstmParams& left, const LstmParams& right);

struct BiLstmTape {
  std::vector<Vec> inputs;  // forward order
  std::vector<Vec> reversed;
  LstmTape left;
  LstmTape right;
};

Vec encode_bilstm(std::span<const Vec> inputs, const LstmParams& left,
                  const LstmParams& right, BiLstmTape* tape = nullptr);

// Returns d/d(inputs) in forward order; accumulates parameter gradients.
std::vector<Vec> encode_bilstm_backward(const LstmParams& left,
                                        const LstmParams& right,
                                        const BiLstmTape& tape,
                                        std::span<const double> dcap,
                                        LstmParams& dleft, LstmParams& dright);

const Vec& encode_precomputed(std::string_view caption_id,
                              const PrecomputedStore& store);

// v_cap = ReLU(W_cap c_cap + b_cap)
Vec caption_dense(std::span<const double> c_cap, const DenseParams& p);

}  // namespace scenelay

#endif  // SCENELAY_ENCODERS_HPP_
