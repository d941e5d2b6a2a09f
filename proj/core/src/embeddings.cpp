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

#include "scenelay/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "scenelay/error.hpp"

namespace scenelay {

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool EmbeddingTable::add(std::string_view token, std::span<const double> values) {
  if (values.size() != dim_) {
    throw ShapeError("embedding for '" + std::string(token) + "' has length " +
                     std::to_string(values.size()) + ", expected " +
                     std::to_string(dim_));
  }
  std::string key = to_lower(token);
  if (index_.count(key)) {
    ++stats_.duplicates;
    return false;
  }
  const double norm = l2_norm(values);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    ++stats_.zero_norm;
    return false;
  }
  const std::size_t row = tokens_.size();
  data_.reserve(data_.size() + dim_);
  for (double v : values) data_.push_back(v / norm);
  index_.emplace(key, row);
  tokens_.push_back(std::move(key));
  ++stats_.loaded;
  return true;
}

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) {
    bool has_upper = std::any_of(token.begin(), token.end(), [](char c) {
      return std::isupper(static_cast<unsigned char>(c));
    });
    if (!has_upper) return std::nullopt;
    it = index_.find(to_lower(token));
    if (it == index_.end()) return std::nullopt;
  }
  return it->second;
}

std::optional<std::span<const double>> EmbeddingTable::lookup(
    std::string_view token) const {
  auto idx = index_of(token);
  if (!idx) return std::nullopt;
  return row(*idx);
}

EmbeddingTable parse_table(std::istream& in, std::size_t dim) {
  if (dim == 0) throw Error("embedding dimension must be positive");
  EmbeddingTable table(dim);
  std::string line;
  std::vector<double> values(dim);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++table.stats_.lines;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) {
      ++table.stats_.bad_arity;
      continue;
    }
    const char* p = line.data() + sp + 1;
    const char* end = line.data() + line.size();
    std::size_t k = 0;
    bool ok = true;
    while (p < end) {
      if (k == dim) {
        ok = false;
        break;
      }
      auto [next, ec] = std::from_chars(p, end, values[k]);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        ok = false;
        break;
      }
      ++k;
      p = next < end ? next + 1 : next;
    }
    if (!ok || k != dim) {
      ++table.stats_.bad_arity;
      continue;
    }
    table.add(std::string_view(line.data(), sp), values);
  }
  return table;
}

EmbeddingTable load_table(const std::filesystem::path& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read embedding file " + path.string());
  EmbeddingTable table = parse_table(in, dim);
  if (table.size() == 0) {
    throw Error("no usable embeddings of dimension " + std::to_string(dim) +
                " in " + path.string());
  }
  return table;
}

void write_table(const EmbeddingTable& table, std::ostream& out) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.token(i);
    for (double v : table.row(i)) out << ' ' << v;
    out << '\n';
  }
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine: length " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  return std::clamp(dot(a, b), -1.0, 1.0);
}

}  // namespace scenelay
