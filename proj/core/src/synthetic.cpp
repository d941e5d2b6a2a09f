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

#include "scenelay/synthetic.hpp"

#include <cctype>

#include "scenelay/rng.hpp"

namespace scenelay {

namespace {

struct ObjectSpec {
  const char* word;
  double hw;
  double hh;
};

const ObjectSpec kObjects[] = {
    {"horse", 0.18, 0.15}, {"kite", 0.10, 0.10},  {"ball", 0.08, 0.08},
    {"board", 0.15, 0.09}, {"dog", 0.12, 0.10},   {"bench", 0.18, 0.10},
    {"book", 0.09, 0.08},  {"bicycle", 0.14, 0.12},
};

// Caption keyword -> ontology relation term.
const std::pair<const char*, const char*> kRelationTerms[] = {
    {"riding", "ride"},     {"holding", "hold"}, {"flying", "fly"},
    {"carrying", "carry"},  {"kicking", "kick"}, {"watching", "watch"},
};

const char* kSubjects[] = {"man", "woman", "boy", "girl"};
const char* kPlaces[] = {"park", "street", "field", "beach", "yard"};
const char* kFiller[] = {"a", "the", "of", "in", "photo", "with", "and",
                         "near", "sunny", "day", "some", "trees", "people"};

Vec random_unit(std::size_t dim, Rng& rng) {
  Vec v(dim);
  for (double& x : v) x = rng.normal();
  const double n = l2_norm(v);
  for (double& x : v) x /= n;
  return v;
}

// Unit vector at roughly `noise`-scaled distance from `base`.
Vec near(const Vec& base, double noise, Rng& rng) {
  Vec u = random_unit(base.size(), rng);
  Vec v(base.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = base[k] + noise * u[k];
  const double n = l2_norm(v);
  for (double& x : v) x /= n;
  return v;
}

std::string sentence(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s += ' ';
    s += w;
  }
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

}  // namespace

const std::vector<KeywordRule>& synthetic_rules() {
  static const std::vector<KeywordRule> rules = {
      {"riding", 0.03, 0.24},  {"holding", 0.12, 0.15},
      {"flying", 0.15, -0.25}, {"carrying", 0.10, -0.18},
      {"kicking", 0.08, 0.22}, {"watching", 0.22, -0.12},
  };
  return rules;
}

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& opts) {
  Rng rng(opts.seed);
  SyntheticCorpus c;
  c.table = EmbeddingTable(opts.dim);

  const Vec person = random_unit(opts.dim, rng);
  c.table.add("person", person);
  for (const char* s : kSubjects) c.table.add(s, near(person, 0.45, rng));
  for (const auto& [word, term] : kRelationTerms) {
    const Vec base = random_unit(opts.dim, rng);
    c.table.add(term, base);
    c.table.add(word, near(base, 0.45, rng));
  }
  for (const auto& o : kObjects) c.table.add(o.word, random_unit(opts.dim, rng));
  for (const char* w : kPlaces) c.table.add(w, random_unit(opts.dim, rng));
  for (const char* w : kFiller) c.table.add(w, random_unit(opts.dim, rng));

  const auto& rules = synthetic_rules();
  constexpr double kW = 640.0, kH = 480.0;
  for (std::size_t i = 0; i < opts.instances; ++i) {
    const std::size_t r = rng.below(rules.size());
    const ObjectSpec& obj = kObjects[rng.below(std::size(kObjects))];
    const std::string subj = kSubjects[rng.below(std::size(kSubjects))];
    const std::string place = kPlaces[rng.below(std::size(kPlaces))];

    BBox s{rng.uniform(0.30, 0.60), rng.uniform(0.35, 0.65),
           rng.uniform(0.06, 0.14), rng.uniform(0.10, 0.20)};
    BBox o{s.cx + rules[r].dx, s.cy + rules[r].dy, obj.hw, obj.hh};
    if (rng.below(2) == 1) {
      // Left-facing scene; alignment mirrors it back.
      s = reflect_x(s);
      o = reflect_x(o);
    }

    ConceptTriplet t;
    t.image_id = "syn" + std::to_string(i);
    t.subject = "person";
    t.relation = kRelationTerms[r].second;
    t.object = obj.word;
    t.subject_box = denormalize_box(s, kW, kH);
    t.object_box = denormalize_box(o, kW, kH);
    t.image_w = kW;
    t.image_h = kH;

    std::vector<std::string> raw = {
        sentence({"a", "photo", "of", "a", subj, rules[r].keyword, "the",
                  obj.word, "in", "the", place}),
        sentence({"a", subj, "in", "the", place, "with", "some", "trees"}),
        sentence({"the", place, "on", "a", "sunny", "day"}),
    };
    // Out-of-vocabulary "on" in the last caption exercises OOV skipping.
    std::span<std::string> order(raw);
    rng.shuffle(order);

    CaptionSet cs;
    cs.image_id = t.image_id;
    for (const auto& text : raw) cs.captions.push_back(tokenize_caption(text));
    c.captions.emplace(t.image_id, std::move(cs));
    c.caption_text.emplace(t.image_id, raw);
    c.triplets.push_back(std::move(t));
  }
  return c;
}

}  // namespace scenelay
