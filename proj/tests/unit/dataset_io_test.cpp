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

#include <gtest/gtest.h>

#include "json.hpp"
#include <sstream>

#include "../support/alignment_fixture.hpp"
#include "scenelay/error.hpp"

namespace scenelay {
namespace {

TEST(TripletJsonTest, ParsesRecord) {
  auto t = triplet_from_json(
      R"({"image_id": 42, "subject": "person", "relation": "read", "object": "book",)"
      R"( "subject_box": [1, 2, 30, 40], "object_box": [5, 6, 7, 8], "image_w": 640, "image_h": 480})");
  EXPECT_EQ(t.image_id, "42");
  EXPECT_EQ(t.relation, "read");
  EXPECT_EQ(t.subject_box.xmax, 30);
  EXPECT_EQ(t.object_box.ymin, 6);
  EXPECT_EQ(t.image_h, 480);
  auto back = triplet_from_json(triplet_to_json(t));
  EXPECT_EQ(back.image_id, "42");
  EXPECT_EQ(back.object_box.ymax, 8);
}

TEST(TripletJsonTest, MalformedLinesAreCounted) {
  std::istringstream in(
      R"({"image_id": "a", "subject": "s", "relation": "r", "object": "o", "subject_box": [0,0,1,1], "object_box": [0,0,1,1], "image_w": 2, "image_h": 2})"
      "\n\nnot json\n"
      R"({"image_id": "b", "subject": "s"})"
      "\n");
  auto r = read_triplets(in);
  EXPECT_EQ(r.triplets.size(), 1u);
  EXPECT_EQ(r.malformed, 2u);
  EXPECT_THROW(triplet_from_json("{}"), Error);
}

TEST(CaptionJsonTest, TokenizesAndMerges) {
  std::istringstream in(
      R"({"image_id": "7", "captions": ["A Man, riding.", "!!!"]})"
      "\n"
      R"({"image_id": "7", "captions": ["the horse"]})"
      "\n");
  auto m = read_caption_sets(in);
  ASSERT_EQ(m.size(), 1u);
  const auto& cs = m.at("7");
  ASSERT_EQ(cs.captions.size(), 2u);
  EXPECT_EQ(cs.captions[0], (Tokens{"a", "man", "riding"}));
  EXPECT_EQ(cs.captions[1], (Tokens{"the", "horse"}));
  std::istringstream bad("{\"image_id\": 1}\n");
  EXPECT_THROW(read_caption_sets(bad), Error);
}

TEST(InstanceJsonTest, RoundTripAndFields) {
  auto t = fixture::planted_table();
  AlignmentConfig cfg;
  auto ds = build_dataset(fixture::planted_triplets(), fixture::planted_captions(), t, cfg);
  std::ostringstream out;
  write_instances(ds.instances, out);
  std::istringstream in(out.str());
  auto back = read_instances(in);
  ASSERT_EQ(back.size(), ds.instances.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(instance_to_json(back[i]), instance_to_json(ds.instances[i]));
  }
  auto j = nlohmann::json::parse(instance_to_json(ds.instances.back()));
  for (const char* k : {"image_id", "caption_id", "tokens", "subj_idx", "obj_idx", "rel_idx",
                        "subject_box", "object_box", "mirrored", "triplet", "scores"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["caption_id"], "img4#1");
  EXPECT_EQ(j["mirrored"], true);
  EXPECT_EQ(j["triplet"]["relation"], "ride");
  EXPECT_TRUE(j["scores"].contains("sc_s"));
}

TEST(InstanceJsonTest, RejectsBadIndices) {
  const std::string line =
      R"({"image_id": "x", "tokens": ["a", "b"], "subj_idx": 0, "obj_idx": 5, "rel_idx": 1,)"
      R"( "subject_box": [0.1, 0.1, 0.1, 0.1], "object_box": [0.2, 0.2, 0.1, 0.1], "mirrored": false,)"
      R"( "triplet": {"subject": "s", "relation": "r", "object": "o"}, "scores": {"sc_s": 1, "sc_r": 1, "sc_o": 1}})";
  EXPECT_THROW(instance_from_json(line), Error);
  std::istringstream in("\n" + line + "\n");
  try {
    read_instances(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ReportJsonTest, HasAllCounters) {
  auto t = fixture::planted_table();
  AlignmentConfig cfg;
  auto ds = build_dataset(fixture::planted_triplets(), fixture::planted_captions(), t, cfg);
  auto j = nlohmann::json::parse(report_to_json(ds.report));
  EXPECT_EQ(j["instances"], 4);
  EXPECT_EQ(j["triplets"], 6);
  EXPECT_EQ(j["rejections"]["low_similarity"], 2);
  EXPECT_EQ(j["rejections"]["single_argument_action"], 0);
  EXPECT_TRUE(j.contains("captions_per_image"));
  EXPECT_TRUE(j.contains("pairs_per_caption"));
}

TEST(DatasetBytesTest, BuildIsByteDeterministic) {
  auto t = fixture::planted_table();
  AlignmentConfig cfg;
  auto render = [&](std::size_t jobs) {
    auto ds = build_dataset(fixture::planted_triplets(), fixture::planted_captions(), t, cfg, jobs);
    std::ostringstream out;
    write_instances(ds.instances, out);
    return out.str() + report_to_json(ds.report);
  };
  const auto a = render(1);
  EXPECT_EQ(a, render(1));
  EXPECT_EQ(a, render(3));
}

}  // namespace
}  // namespace scenelay
