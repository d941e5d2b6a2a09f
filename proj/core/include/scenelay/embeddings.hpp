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

#ifndef SCENELAY_EMBEDDINGS_HPP_
#define SCENELAY_EMBEDDINGS_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scenelay/tensor.hpp"

namespace scenelay {

// Counters collected while parsing an embedding file.
struct LoadStats {
  std::size_t lines = 0;
  std::size_t loaded = 0;
  std::size_t duplicates = 0;
  std::size_t bad_arity = 0;
  std::size_t zero_norm = 0;
};

// Immutable vocabulary of unit-normalized word vectors stored in one
// contiguous row-major block. Keys are lowercase.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  const LoadStats& stats() const { return stats_; }

  // Adds `values` normalized to unit length. Returns false (and counts) on a
  // duplicate or zero-norm vector; throws ShapeError on wrong length.
  bool add(std::string_view token, std::span<const double> values);

  std::optional<std::span<const double>> lookup(std::string_view token) const;
  std::optional<std::size_t> index_of(std::string_view token) const;
  bool contains(std::string_view token) const {
    return index_of(token).has_value();
  }

  std::span<const double> row(std::size_t index) const {
    return {data_.data() + index * dim_, dim_};
  }
  const std::string& token(std::size_t index) const { return tokens_[index]; }

 private:
  friend EmbeddingTable parse_table(std::istream& in, std::size_t dim);

  std::size_t dim_ = 0;
  std::vector<double> data_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  LoadStats stats_;
};

// Reads GloVe-style text: `token v1 ... v_dim` per line, single-space
// separated. Malformed lines and zero vectors are skipped and counted.
EmbeddingTable load_table(const std::filesystem::path& path, std::size_t dim);
EmbeddingTable parse_table(std::istream& in, std::size_t dim);

// Writes the table back out in the same text format.
void write_table(const EmbeddingTable& table, std::ostream& out);

// Dot product of two unit vectors, clamped to [-1, 1].
double cosine(std::span<const double> a, std::span<const double> b);

std::string to_lower(std::string_view s);

}  // namespace scenelay

#endif  // SCENELAY_EMBEDDINGS_HPP_
