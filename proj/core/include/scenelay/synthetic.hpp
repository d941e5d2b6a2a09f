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

#ifndef SCENELAY_SYNTHETIC_HPP_
#define SCENELAY_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "scenelay/alignment.hpp"
#include "scenelay/embeddings.hpp"

namespace scenelay {

// A desk-scale corpus whose object boxes follow a deterministic rule: the
// relation keyword in the caption fixes the object's offset from the subject
// and the object noun fixes its size. Vertical offsets are never small, so
// above/below is separable from the keyword alone.
struct SyntheticCorpus {
  EmbeddingTable table;
  std::vector<ConceptTriplet> triplets;
  std::unordered_map<std::string, CaptionSet> captions;
  // Raw caption strings per image, for writing the captions file.
  std::unordered_map<std::string, std::vector<std::string>> caption_text;
};

struct SyntheticOptions {
  std::size_t instances = 320;
  std::size_t dim = 32;
  std::uint64_t seed = 1;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& opts);

struct KeywordRule {
  std::string keyword;
  double dx;
  double dy;
};

const std::vector<KeywordRule>& synthetic_rules();

}  // namespace scenelay

#endif  // SCENELAY_SYNTHETIC_HPP_
