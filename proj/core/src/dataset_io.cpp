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

#include "scenelay/dataset_io.hpp"

#include <fstream>

#include "json.hpp"
#include "scenelay/error.hpp"

namespace scenelay {

using nlohmann::json;

namespace {

std::string id_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(std::string("field '") + key + "' must be a string or integer");
}

PixelBox pixel_box(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("box must have 4 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
          j[3].get<double>()};
}

BBox bbox(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error("box must have 4 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
          j[3].get<double>()};
}

json box_json(const BBox& b) { return json::array({b.cx, b.cy, b.hw, b.hh}); }

template <typename F>
auto with_line_context(std::size_t line_no, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error("line " + std::to_string(line_no) + ": " + e.what());
  }
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

ConceptTriplet triplet_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    ConceptTriplet t;
    t.image_id = id_field(j, "image_id");
    t.subject = j.at("subject").get<std::string>();
    t.relation = j.at("relation").get<std::string>();
    t.object = j.at("object").get<std::string>();
    t.subject_box = pixel_box(j.at("subject_box"));
    t.object_box = pixel_box(j.at("object_box"));
    t.image_w = j.at("image_w").get<double>();
    t.image_h = j.at("image_h").get<double>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad triplet: ") + e.what());
  }
}

std::string triplet_to_json(const ConceptTriplet& t) {
  auto pb = [](const PixelBox& b) {
    return json::array({b.xmin, b.ymin, b.xmax, b.ymax});
  };
  json j{{"image_id", t.image_id},       {"subject", t.subject},
         {"relation", t.relation},       {"object", t.object},
         {"subject_box", pb(t.subject_box)}, {"object_box", pb(t.object_box)},
         {"image_w", t.image_w},         {"image_h", t.image_h}};
  return j.dump();
}

TripletRead read_triplets(std::istream& in) {
  TripletRead out;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    try {
      out.triplets.push_back(triplet_from_json(line));
    } catch (const std::exception&) {
      ++out.malformed;
    }
  }
  return out;
}

CaptionSet caption_set_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    CaptionSet cs;
    cs.image_id = id_field(j, "image_id");
    for (const auto& c : j.at("captions")) {
      Tokens toks = tokenize_caption(c.get<std::string>());
      if (!toks.empty()) cs.captions.push_back(std::move(toks));
    }
    return cs;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad caption record: ") + e.what());
  }
}

std::unordered_map<std::string, CaptionSet> read_caption_sets(std::istream& in) {
  std::unordered_map<std::string, CaptionSet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    CaptionSet cs = with_line_context(line_no, [&] { return caption_set_from_json(line); });
    auto [it, inserted] = out.try_emplace(cs.image_id, cs);
    if (!inserted) {
      // Several records for one image extend its caption list.
      for (auto& c : cs.captions) it->second.captions.push_back(std::move(c));
    }
  }
  return out;
}

std::string caption_set_to_json(const std::string& image_id,
                                const std::vector<std::string>& captions) {
  return json{{"image_id", image_id}, {"captions", captions}}.dump();
}

std::string instance_to_json(const Instance& inst) {
  json j{{"image_id", inst.image_id},
         {"caption_id", inst.caption_id()},
         {"tokens", inst.tokens},
         {"subj_idx", inst.subj_idx},
         {"obj_idx", inst.obj_idx},
         {"rel_idx", inst.rel_idx},
         {"subject_box", box_json(inst.subject_box)},
         {"object_box", box_json(inst.object_box)},
         {"mirrored", inst.mirrored},
         {"triplet",
          {{"subject", inst.triplet.subject},
           {"relation", inst.triplet.relation},
           {"object", inst.triplet.object}}},
         {"scores",
          {{"caption_index", inst.scores.caption_index},
           {"sc_s", inst.scores.sc_s},
           {"sc_r", inst.scores.sc_r},
           {"sc_o", inst.scores.sc_o}}}};
  return j.dump();
}

Instance instance_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    Instance inst;
    inst.image_id = id_field(j, "image_id");
    inst.tokens = j.at("tokens").get<Tokens>();
    inst.subj_idx = j.at("subj_idx").get<std::size_t>();
    inst.obj_idx = j.at("obj_idx").get<std::size_t>();
    inst.rel_idx = j.at("rel_idx").get<std::size_t>();
    inst.subject_box = bbox(j.at("subject_box"));
    inst.object_box = bbox(j.at("object_box"));
    inst.mirrored = j.value("mirrored", false);
    if (j.contains("triplet")) {
      const json& t = j["triplet"];
      inst.triplet = {t.value("subject", ""), t.value("relation", ""),
                      t.value("object", "")};
    }
    if (j.contains("scores")) {
      const json& s = j["scores"];
      inst.scores.caption_index = s.value("caption_index", std::size_t{0});
      inst.scores.sc_s = s.value("sc_s", 0.0);
      inst.scores.sc_r = s.value("sc_r", 0.0);
      inst.scores.sc_o = s.value("sc_o", 0.0);
    }
    inst.scores.j_s = inst.subj_idx;
    inst.scores.j_o = inst.obj_idx;
    inst.scores.j_r = inst.rel_idx;
    const std::size_t n = inst.tokens.size();
    if (inst.subj_idx >= n || inst.obj_idx >= n || inst.rel_idx >= n) {
      throw Error("token index out of range");
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad instance: ") + e.what());
  }
}

std::vector<Instance> read_instances(std::istream& in) {
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    out.push_back(with_line_context(line_no, [&] { return instance_from_json(line); }));
  }
  return out;
}

std::vector<Instance> read_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read dataset " + path.string());
  return read_instances(in);
}

void write_instances(std::span<const Instance> instances, std::ostream& out) {
  for (const auto& inst : instances) out << instance_to_json(inst) << '\n';
}

std::string report_to_json(const BuildReport& r, int indent) {
  json j{{"triplets", r.triplets},
         {"instances", r.instances},
         {"images", r.images},
         {"captions", r.captions},
         {"captions_per_image", r.captions_per_image()},
         {"pairs_per_caption", r.pairs_per_caption()},
         {"shared_token_instances", r.shared_token_instances},
         {"rejected", r.rejected()},
         {"rejections", r.rejections}};
  return j.dump(indent);
}

}  // namespace scenelay
