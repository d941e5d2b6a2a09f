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

#include "scenelay/encoders.hpp"

#include <fstream>

#include "json.hpp"
#include "scenelay/error.hpp"

namespace scenelay {

std::optional<EncoderKind> parse_encoder_kind(std::string_view s) {
  if (s == "avg") return EncoderKind::kAvg;
  if (s == "bilstm") return EncoderKind::kBiLstm;
  if (s == "precomputed") return EncoderKind::kPrecomputed;
  return std::nullopt;
}

std::string_view to_string(EncoderKind k) {
  switch (k) {
    case EncoderKind::kAvg: return "avg";
    case EncoderKind::kBiLstm: return "bilstm";
    case EncoderKind::kPrecomputed: return "precomputed";
  }
  return "?";
}

void PrecomputedStore::add(std::string caption_id, Vec v) {
  if (v.empty()) throw Error("empty vector for caption " + caption_id);
  if (dim_ == 0) dim_ = v.size();
  if (v.size() != dim_) {
    throw ShapeError("precomputed vector for " + caption_id + " has length " +
                     std::to_string(v.size()) + ", store uses " +
                     std::to_string(dim_));
  }
  vectors_.insert_or_assign(std::move(caption_id), std::move(v));
}

const Vec& PrecomputedStore::at(std::string_view caption_id) const {
  auto it = vectors_.find(std::string(caption_id));
  if (it == vectors_.end()) {
    throw Error("caption id not in precomputed store: " + std::string(caption_id));
  }
  return it->second;
}

bool PrecomputedStore::contains(std::string_view caption_id) const {
  return vectors_.count(std::string(caption_id)) != 0;
}

PrecomputedStore parse_store(std::istream& in) {
  PrecomputedStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      store.add(j.at("caption_id").get<std::string>(),
                j.at("vector").get<Vec>());
    } catch (const std::exception& e) {
      throw Error("store line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

PrecomputedStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read precomputed store " + path.string());
  return parse_store(in);
}

Vec encode_avg(std::span<const std::size_t> rows, const EmbeddingTable& table) {
  if (rows.empty()) throw Error("caption has no in-vocabulary tokens");
  Vec mean(table.dim(), 0.0);
  for (std::size_t r : rows) {
    auto v = table.row(r);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += v[k];
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& x : mean) x *= inv;
  return mean;
}

Vec encode_avg(const Tokens& tokens, const EmbeddingTable& table) {
  std::vector<std::size_t> rows;
  for (const auto& t : tokens) {
    if (auto r = table.index_of(t)) rows.push_back(*r);
  }
  return encode_avg(rows, table);
}

Vec encode_bilstm(std::span<const Vec> inputs, const LstmParams& left,
                  const LstmParams& right, BiLstmTape* tape) {
  if (inputs.empty()) throw Error("caption has no in-vocabulary tokens");
  std::vector<Vec> reversed(inputs.rbegin(), inputs.rend());
  Vec hl = lstm_forward(left, inputs, tape ? &tape->left : nullptr);
  Vec hr = lstm_forward(right, reversed, tape ? &tape->right : nullptr);
  if (tape) {
    tape->inputs.assign(inputs.begin(), inputs.end());
    tape->reversed = std::move(reversed);
  }
  return concat({hl, hr});
}

Vec encode_bilstm(const Tokens& tokens, const EmbeddingTable& table,
                  const LstmParams& left, const LstmParams& right) {
  std::vector<Vec> inputs;
  for (const auto& t : tokens) {
    if (auto v = table.lookup(t)) inputs.emplace_back(v->begin(), v->end());
  }
  return encode_bilstm(inputs, left, right);
}

std::vector<Vec> encode_bilstm_backward(const LstmParams& left,
                                        const LstmParams& right,
                                        const BiLstmTape& tape,
                                        std::span<const double> dcap,
                                        LstmParams& dleft, LstmParams& dright) {
  const std::size_t H = left.hidden;
  if (dcap.size() != H + right.hidden) {
    throw ShapeError("bilstm backward: gradient length " + std::to_string(dcap.size()));
  }
  std::vector<Vec> dl = lstm_backward(left, tape.left, dcap.subspan(0, H), dleft);
  std::vector<Vec> dr = lstm_backward(right, tape.right, dcap.subspan(H), dright);
  const std::size_t n = dl.size();
  for (std::size_t t = 0; t < n; ++t) {
    const Vec& add = dr[n - 1 - t];
    for (std::size_t k = 0; k < add.size(); ++k) dl[t][k] += add[k];
  }
  return dl;
}

const Vec& encode_precomputed(std::string_view caption_id,
                              const PrecomputedStore& store) {
  return store.at(caption_id);
}

Vec caption_dense(std::span<const double> c_cap, const DenseParams& p) {
  return relu(dense(p, c_cap));
}

}  // namespace scenelay
