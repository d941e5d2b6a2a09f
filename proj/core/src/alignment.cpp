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

#include "scenelay/alignment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "scenelay/error.hpp"
#include "scenelay/rng.hpp"

namespace scenelay {

namespace {

bool finite_box(const PixelBox& b) {
  return std::isfinite(b.xmin) && std::isfinite(b.ymin) &&
         std::isfinite(b.xmax) && std::isfinite(b.ymax);
}

bool passes_threshold(const AlignmentScore& s, const AlignmentConfig& cfg) {
  switch (cfg.scope) {
    case ThresholdScope::kSubjectObject:
      return std::min(s.sc_s, s.sc_o) >= cfg.threshold;
    case ThresholdScope::kAll:
      return std::min({s.sc_s, s.sc_r, s.sc_o}) >= cfg.threshold;
    case ThresholdScope::kMean:
      return s.sum() / 3.0 >= cfg.threshold;
  }
  return false;
}

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string ConceptTriplet::validate() const {
  if (image_id.empty()) return "empty image_id";
  if (subject.empty() || relation.empty() || object.empty()) {
    return "empty triplet term";
  }
  if (!(image_w > 0.0) || !(image_h > 0.0) || !std::isfinite(image_w) ||
      !std::isfinite(image_h)) {
    return "non-positive image size";
  }
  if (!finite_box(subject_box) || !finite_box(object_box)) {
    return "non-finite box coordinate";
  }
  if (!subject_box.well_ordered() || !object_box.well_ordered()) {
    return "box corners out of order";
  }
  return {};
}

std::string Instance::caption_id() const {
  return image_id + "#" + std::to_string(scores.caption_index);
}

Tokens tokenize_caption(std::string_view text) {
  Tokens out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else if (!std::ispunct(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::optional<TokenMatch> best_token(std::span<const double> term,
                                     const Tokens& caption,
                                     const EmbeddingTable& table) {
  std::optional<TokenMatch> best;
  for (std::size_t j = 0; j < caption.size(); ++j) {
    auto v = table.lookup(caption[j]);
    if (!v) continue;
    const double sc = cosine(term, *v);
    if (!best || sc > best->score) best = TokenMatch{j, sc};
  }
  return best;
}

std::optional<Vec> term_vector(std::string_view term,
                               const EmbeddingTable& table) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : term) {
    if (c == ' ' || c == '_') {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  if (words.empty()) return std::nullopt;

  Vec sum(table.dim(), 0.0);
  for (const auto& w : words) {
    auto v = table.lookup(w);
    if (!v) return std::nullopt;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*v)[k];
  }
  if (words.size() == 1) return sum;
  const double norm = l2_norm(sum);
  if (!(norm > 0.0)) return std::nullopt;
  for (double& x : sum) x /= norm;
  return sum;
}

std::optional<TermVectors> triplet_vectors(const ConceptTriplet& t,
                                           const EmbeddingTable& table) {
  auto s = term_vector(t.subject, table);
  auto r = term_vector(t.relation, table);
  auto o = term_vector(t.object, table);
  if (!s || !r || !o) return std::nullopt;
  return TermVectors{std::move(*s), std::move(*r), std::move(*o)};
}

std::optional<AlignmentScore> score_caption(const TermVectors& terms,
                                            const Tokens& caption,
                                            const EmbeddingTable& table) {
  auto s = best_token(terms.s, caption, table);
  if (!s) return std::nullopt;
  auto r = best_token(terms.r, caption, table);
  auto o = best_token(terms.o, caption, table);
  AlignmentScore out;
  out.j_s = s->index;
  out.j_r = r->index;
  out.j_o = o->index;
  out.sc_s = s->score;
  out.sc_r = r->score;
  out.sc_o = o->score;
  return out;
}

std::optional<AlignmentScore> select_caption(const TermVectors& terms,
                                             const CaptionSet& caps,
                                             const EmbeddingTable& table) {
  std::optional<AlignmentScore> best;
  for (std::size_t i = 0; i < caps.captions.size(); ++i) {
    auto sc = score_caption(terms, caps.captions[i], table);
    if (!sc) continue;
    sc->caption_index = i;
    if (!best || sc->sum() > best->sum()) best = sc;
  }
  return best;
}

std::optional<ThresholdScope> parse_threshold_scope(std::string_view s) {
  if (s == "so") return ThresholdScope::kSubjectObject;
  if (s == "sro") return ThresholdScope::kAll;
  if (s == "sum") return ThresholdScope::kMean;
  return std::nullopt;
}

std::string_view to_string(ThresholdScope s) {
  switch (s) {
    case ThresholdScope::kSubjectObject: return "so";
    case ThresholdScope::kAll: return "sro";
    case ThresholdScope::kMean: return "sum";
  }
  return "?";
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kMalformed: return "malformed";
    case RejectReason::kSingleArgumentAction: return "single_argument_action";
    case RejectReason::kNoCaptions: return "no_captions";
    case RejectReason::kOov: return "oov";
    case RejectReason::kLowSimilarity: return "low_similarity";
    case RejectReason::kDegeneratePair: return "degenerate_pair";
  }
  return "?";
}

BuildResult build_instance(const ConceptTriplet& triplet,
                           const CaptionSet& caps,
                           const EmbeddingTable& table,
                           const AlignmentConfig& cfg) {
  if (auto defect = triplet.validate(); !defect.empty()) {
    return Rejection{RejectReason::kMalformed, defect, std::nullopt};
  }
  if (cfg.banned_actions.count(to_lower(triplet.relation))) {
    return Rejection{RejectReason::kSingleArgumentAction, triplet.relation,
                     std::nullopt};
  }
  auto terms = triplet_vectors(triplet, table);
  if (!terms) {
    return Rejection{RejectReason::kOov, "triplet term without embedding",
                     std::nullopt};
  }
  auto best = select_caption(*terms, caps, table);
  if (!best) {
    return Rejection{RejectReason::kOov, "no caption has in-vocabulary tokens",
                     std::nullopt};
  }
  if (!passes_threshold(*best, cfg)) {
    return Rejection{RejectReason::kLowSimilarity,
                     "sc_s=" + format_score(best->sc_s) +
                         " sc_r=" + format_score(best->sc_r) +
                         " sc_o=" + format_score(best->sc_o),
                     best};
  }
  if (best->j_s == best->j_o) {
    return Rejection{RejectReason::kDegeneratePair,
                     "subject and object share token " +
                         std::to_string(best->j_s),
                     best};
  }

  const BBox s = normalize_box(triplet.subject_box, triplet.image_w, triplet.image_h);
  const BBox o = normalize_box(triplet.object_box, triplet.image_w, triplet.image_h);
  const MirroredPair m = mirror_pair(s, o);

  Instance inst;
  inst.image_id = triplet.image_id;
  inst.tokens = caps.captions[best->caption_index];
  inst.subj_idx = best->j_s;
  inst.obj_idx = best->j_o;
  inst.rel_idx = best->j_r;
  inst.subject_box = m.subject;
  inst.object_box = m.object;
  inst.mirrored = m.mirrored;
  inst.triplet = {to_lower(triplet.subject), to_lower(triplet.relation),
                  to_lower(triplet.object)};
  inst.scores = *best;
  return inst;
}

std::size_t BuildReport::rejected() const {
  std::size_t n = 0;
  for (const auto& [_, c] : rejections) n += c;
  return n;
}

double BuildReport::captions_per_image() const {
  return images == 0 ? 0.0 : static_cast<double>(captions) / images;
}

double BuildReport::pairs_per_caption() const {
  return captions == 0 ? 0.0 : static_cast<double>(instances) / captions;
}

DatasetBuild build_dataset(
    std::span<const ConceptTriplet> triplets,
    const std::unordered_map<std::string, CaptionSet>& captions,
    const EmbeddingTable& table, const AlignmentConfig& cfg,
    std::size_t jobs) {
  DatasetBuild out;
  out.results.resize(triplets.size(),
                     Rejection{RejectReason::kMalformed, {}, std::nullopt});

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const ConceptTriplet& t = triplets[i];
      auto it = captions.find(t.image_id);
      if (it == captions.end() || it->second.captions.empty()) {
        if (auto defect = t.validate(); !defect.empty()) {
          out.results[i] = Rejection{RejectReason::kMalformed, defect, std::nullopt};
        } else {
          out.results[i] = Rejection{RejectReason::kNoCaptions, t.image_id,
                                     std::nullopt};
        }
        continue;
      }
      out.results[i] = build_instance(t, it->second, table, cfg);
    }
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, triplets.size()));
  if (jobs <= 1) {
    work(0, triplets.size());
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (triplets.size() + jobs - 1) / jobs;
    for (std::size_t w = 0; w < jobs; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(triplets.size(), b + chunk);
      if (b >= e) break;
      workers.emplace_back(work, b, e);
    }
    for (auto& t : workers) t.join();
  }

  BuildReport& rep = out.report;
  rep.triplets = triplets.size();
  for (RejectReason r : kAllRejectReasons) rep.rejections[std::string(to_string(r))] = 0;
  std::unordered_set<std::string> images;
  std::unordered_set<std::string> caption_ids;
  for (const auto& res : out.results) {
    if (const auto* rej = std::get_if<Rejection>(&res)) {
      ++rep.rejections[std::string(to_string(rej->reason))];
      continue;
    }
    const Instance& inst = std::get<Instance>(res);
    images.insert(inst.image_id);
    caption_ids.insert(inst.caption_id());
    if (inst.rel_idx == inst.subj_idx || inst.rel_idx == inst.obj_idx) {
      ++rep.shared_token_instances;
    }
    out.instances.push_back(inst);
  }
  rep.instances = out.instances.size();
  rep.images = images.size();
  rep.captions = caption_ids.size();
  return out;
}

std::vector<std::size_t> audit_indices(std::size_t dataset_size, std::size_t n,
                                       std::uint64_t seed) {
  if (n > dataset_size) {
    throw Error("audit sample of " + std::to_string(n) +
                " exceeds dataset size " + std::to_string(dataset_size));
  }
  std::vector<std::size_t> idx(dataset_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(dataset_size - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

void audit_sample(std::span<const Instance> dataset, std::size_t n,
                  std::uint64_t seed, std::ostream& out) {
  const auto picks = audit_indices(dataset.size(), n, seed);
  if (n == 0) return;
  out << "# alignment audit: " << n << " of " << dataset.size()
      << " instances, seed " << seed << "\n"
      << "# [subject] <relation> {object}; replace each _ with y or n\n";
  std::size_t k = 0;
  for (std::size_t idx : picks) {
    const Instance& inst = dataset[idx];
    out << "\n[" << ++k << "] instance=" << idx << " image_id=" << inst.image_id
        << " caption_id=" << inst.caption_id()
        << (inst.mirrored ? " mirrored" : "") << "\n";
    out << "caption: ";
    for (std::size_t j = 0; j < inst.tokens.size(); ++j) {
      std::string tok = inst.tokens[j];
      if (j == inst.rel_idx) tok = "<" + tok + ">";
      if (j == inst.obj_idx) tok = "{" + tok + "}";
      if (j == inst.subj_idx) tok = "[" + tok + "]";
      out << (j ? " " : "") << tok;
    }
    out << "\ntriplet: (" << inst.triplet.subject << ", "
        << inst.triplet.relation << ", " << inst.triplet.object << ")\n";
    out << "scores: sc_s=" << format_score(inst.scores.sc_s)
        << " sc_r=" << format_score(inst.scores.sc_r)
        << " sc_o=" << format_score(inst.scores.sc_o) << "\n";
    out << "subject_ok: _  object_ok: _  relation_ok: _\n";
  }
}

std::set<std::string> parse_banned_actions(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    out.insert(to_lower(line.substr(b, e - b + 1)));
  }
  return out;
}

std::set<std::string> default_banned_actions() {
  return {"smile", "look", "stand", "walk", "run"};
}

}  // namespace scenelay
