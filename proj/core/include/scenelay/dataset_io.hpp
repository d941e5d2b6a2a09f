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

#ifndef SCENELAY_DATASET_IO_HPP_
#define SCENELAY_DATASET_IO_HPP_

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scenelay/alignment.hpp"

namespace scenelay {

// JSON Lines codecs for the pipeline's file formats. Parsers throw Error
// with the offending line number.

// {"image_id", "subject", "relation", "object", "subject_box":[xmin,ymin,
//  xmax,ymax], "object_box":[...], "image_w", "image_h"}
ConceptTriplet triplet_from_json(std::string_view line);
std::string triplet_to_json(const ConceptTriplet& t);

struct TripletRead {
  std::vector<ConceptTriplet> triplets;
  // Lines that failed to parse; each becomes a malformed rejection.
  std::size_t malformed = 0;
};
TripletRead read_triplets(std::istream& in);

// {"image_id", "captions":[string,...]}; captions are tokenized on read.
CaptionSet caption_set_from_json(std::string_view line);
std::unordered_map<std::string, CaptionSet> read_caption_sets(std::istream& in);
std::string caption_set_to_json(const std::string& image_id,
                                const std::vector<std::string>& captions);

// {"image_id", "caption_id", "tokens", "subj_idx", "obj_idx", "rel_idx",
//  "subject_box":[cx,cy,hw,hh], "object_box", "mirrored",
//  "triplet":{subject,relation,object},
//  "scores":{caption_index,sc_s,sc_r,sc_o}}
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(std::string_view line);
std::vector<Instance> read_instances(std::istream& in);
std::vector<Instance> read_instances(const std::filesystem::path& path);
void write_instances(std::span<const Instance> instances, std::ostream& out);

std::string report_to_json(const BuildReport& report, int indent = 2);

}  // namespace scenelay

#endif  // SCENELAY_DATASET_IO_HPP_
