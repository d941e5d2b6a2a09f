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

#ifndef SCENELAY_ALIGNMENT_HPP_
#define SCENELAY_ALIGNMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "scenelay/embeddings.hpp"
#include "scenelay/geometry.hpp"

namespace scenelay {

using Tokens = std::vector<std::string>;

// A (subject, relation, object) ontology triplet annotated on one image.
struct ConceptTriplet {
  std::string image_id;
  std::string subject;
  std::string relation;
  std::string object;
  PixelBox subject_box;
  PixelBox object_box;
  double image_w = 0.0;
  double image_h = 0.0;

  // Empty when the record is usable, otherwise a description of the defect.
  std::string validate() const;
};

struct CaptionSet {
  std::string image_id;
  std::vector<Tokens> captions;
};

struct AlignmentScore {
  std::size_t caption_index = 0;
  std::size_t j_s = 0;
  std::size_t j_r = 0;
  std::size_t j_o = 0;
  double sc_s = 0.0;
  double sc_r = 0.0;
  double sc_o = 0.0;

  double sum() const { return sc_s + sc_r + sc_o; }
};

struct TripletTerms {
  std::string subject;
  std::string relation;
  std::string object;
};

struct Instance {
  std::string image_id;
  Tokens tokens;
  std::size_t subj_idx = 0;
  std::size_t obj_idx = 0;
  std::size_t rel_idx = 0;
  BBox subject_box;
  BBox object_box;
  bool mirrored = false;
  TripletTerms triplet;
  AlignmentScore scores;

  // Identifier of the selected caption, `<image_id>#<caption_index>`.
  std::string caption_id() const;
};

// Lowercases, strips ASCII punctuation and splits on whitespace.
Tokens tokenize_caption(std::string_view text);

struct TokenMatch {
  std::size_t index = 0;
  double score = 0.0;
};

// Caption token with the highest cosine to `term`; ties go to the smallest
// index. OOV tokens are never candidates. nullopt if none is in vocabulary.
std::optional<TokenMatch> best_token(std::span<const double> term,
                                     const Tokens& caption,
                                     const EmbeddingTable& table);

struct TermVectors {
  Vec s;
  Vec r;
  Vec o;
};

// Unit vector for an ontology term. Multi-word terms ("cell phone",
// "sports_ball") use the renormalized mean of their words; any OOV word makes
// the whole term absent.
std::optional<Vec> term_vector(std::string_view term,
                               const EmbeddingTable& table);

std::optional<TermVectors> triplet_vectors(const ConceptTriplet& t,
                                           const EmbeddingTable& table);

std::optional<AlignmentScore> score_caption(const TermVectors& terms,
                                            const Tokens& caption,
                                            const EmbeddingTable& table);

// Caption with the largest sc_s + sc_r + sc_o; ties go to the smallest index.
std::optional<AlignmentScore> select_caption(const TermVectors& terms,
                                             const CaptionSet& caps,
                                             const EmbeddingTable& table);

enum class ThresholdScope {
  kSubjectObject,  // min(sc_s, sc_o) >= t
  kAll,            // min(sc_s, sc_r, sc_o) >= t
  kMean,           // (sc_s + sc_r + sc_o) / 3 >= t
};

std::optional<ThresholdScope> parse_threshold_scope(std::string_view s);
std::string_view to_string(ThresholdScope s);

struct AlignmentConfig {
  double threshold = 0.75;
  ThresholdScope scope = ThresholdScope::kSubjectObject;
  std::set<std::string> banned_actions;
};

enum class RejectReason {
  kMalformed,
  kSingleArgumentAction,
  kNoCaptions,
  kOov,
  kLowSimilarity,
  kDegeneratePair,
};

inline constexpr RejectReason kAllRejectReasons[] = {
    RejectReason::kMalformed,     RejectReason::kSingleArgumentAction,
    RejectReason::kNoCaptions,    RejectReason::kOov,
    RejectReason::kLowSimilarity, RejectReason::kDegeneratePair,
};

std::string_view to_string(RejectReason r);

struct Rejection {
  RejectReason reason;
  std::string detail;
  // Set when a caption was selected before the rejection.
  std::optional<AlignmentScore> scores;
};

using BuildResult = std::variant<Instance, Rejection>;

BuildResult build_instance(const ConceptTriplet& triplet,
                           const CaptionSet& caps,
                           const EmbeddingTable& table,
                           const AlignmentConfig& cfg);

struct BuildReport {
  std::size_t triplets = 0;
  std::size_t instances = 0;
  std::size_t images = 0;
  std::size_t captions = 0;
  // Instances where two triplet terms landed on the same caption token.
  std::size_t shared_token_instances = 0;
  std::map<std::string, std::size_t> rejections;

  std::size_t rejected() const;
  double captions_per_image() const;
  double pairs_per_caption() const;
};

struct DatasetBuild {
  std::vector<Instance> instances;
  // One entry per input triplet, in input order.
  std::vector<BuildResult> results;
  BuildReport report;
};

// Aligns every triplet. Output order equals input order regardless of
// `jobs`.
DatasetBuild build_dataset(
    std::span<const ConceptTriplet> triplets,
    const std::unordered_map<std::string, CaptionSet>& captions,
    const EmbeddingTable& table, const AlignmentConfig& cfg,
    std::size_t jobs = 1);

// Seeded sample of `n` instances written in a human-reviewable layout with
// the subject, relation and object tokens marked in the caption.
void audit_sample(std::span<const Instance> dataset, std::size_t n,
                  std::uint64_t seed, std::ostream& out);

// Indices chosen by audit_sample, in output order.
std::vector<std::size_t> audit_indices(std::size_t dataset_size, std::size_t n,
                                       std::uint64_t seed);

// Reads the banned single-argument action list: one term per line, `#`
// comments and blank lines ignored.
std::set<std::string> parse_banned_actions(std::istream& in);
std::set<std::string> default_banned_actions();

}  // namespace scenelay

#endif  // SCENELAY_ALIGNMENT_HPP_
