// Copyright 2026 The dictner Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include "doctest.h"
#include "dictner/dictionary.h"
#include "dictner/error.h"
#include "dictner/tensor.h"

using namespace dictner;

namespace {

Dictionary dict_of(std::initializer_list<std::pair<std::u32string, EntityType>> entries) {
  Dictionary d;
  for (const auto& [s, t] : entries) d.add(s, t);
  return d;
}

std::u32string concat(const SegmentList& segs) {
  std::u32string s;
  for (const auto& seg : segs.segments) s += seg.text;
  return s;
}

void check_tiling(const SegmentList& segs, std::u32string_view text, const Dictionary& dict) {
  CHECK(concat(segs) == text);
  std::size_t pos = 0;
  for (const auto& seg : segs.segments) {
    CHECK(seg.start == pos);
    pos += seg.text.size();
    CHECK(seg.text.size() <= std::max<std::size_t>(1, dict.max_len()));
    if (!seg.type) CHECK(seg.text.size() == 1);
  }
}

constexpr auto b = EntityType::kBody;
constexpr auto d = EntityType::kDisease;
constexpr auto s = EntityType::kSymptom;
constexpr auto t = EntityType::kTreatment;
constexpr auto e = EntityType::kExam;

}  // namespace

TEST_CASE("load_dictionary") {
  SUBCASE("two entries") {
    std::istringstream in("瞳孔\tb\n维生素C\tt\n");
    const Dictionary dict = load_dictionary(in);
    CHECK(dict.surface_count() == 2);
    CHECK(dict.max_len() == 4);
  }
  SUBCASE("empty") {
    std::istringstream in("");
    const Dictionary dict = load_dictionary(in);
    CHECK(dict.empty());
    CHECK(dict.max_len() == 0);
  }
  SUBCASE("multi-type surface keeps file order") {
    std::istringstream in("# comment\n维生素C\tt\n\n维生素C\te\n");
    const Dictionary dict = load_dictionary(in);
    CHECK(dict.surface_count() == 1);
    CHECK(lookup_exact(U"维生素C", dict) == std::vector<EntityType>{t, e});
  }
  SUBCASE("duplicate pair is a warning") {
    std::istringstream in("瞳孔\tb\n瞳孔\tb\n");
    std::vector<std::string> warnings;
    const Dictionary dict = load_dictionary(in, &warnings);
    CHECK(dict.entry_count() == 1);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("line 2") != std::string::npos);
  }
  SUBCASE("errors") {
    std::istringstream bad_type("瞳孔\tx\n");
    CHECK_THROWS_AS(load_dictionary(bad_type), DataError);
    std::istringstream empty_surface("\tb\n");
    CHECK_THROWS_AS(load_dictionary(empty_surface), DataError);
    std::istringstream no_tab("瞳孔\n");
    CHECK_THROWS_AS(load_dictionary(no_tab), DataError);
  }
}

TEST_CASE("forward_max_match") {
  const Dictionary pupil = dict_of({{U"瞳孔", b}});
  const auto segs = forward_max_match(U"双侧瞳孔", pupil);
  REQUIRE(segs.size() == 3);
  CHECK(segs.segments[0] == Segment{U"双", std::nullopt, 0});
  CHECK(segs.segments[1] == Segment{U"侧", std::nullopt, 1});
  CHECK(segs.segments[2] == Segment{U"瞳孔", b, 2});

  const auto empty = forward_max_match(U"腹平坦", Dictionary{});
  CHECK(empty.size() == 3);
  CHECK(empty.entity_count() == 0);

  const auto twice = forward_max_match(U"瞳孔瞳孔", pupil);
  REQUIRE(twice.size() == 2);
  CHECK(twice.entity_count() == 2);
}

TEST_CASE("backward_max_match") {
  const auto segs = backward_max_match(U"双侧瞳孔", dict_of({{U"瞳孔", b}}));
  REQUIRE(segs.size() == 3);
  CHECK(segs.segments[2] == Segment{U"瞳孔", b, 2});
  CHECK(backward_max_match(U"", dict_of({{U"瞳孔", b}})).size() == 0);
}

TEST_CASE("forward and backward diverge on overlapping entries") {
  const Dictionary dict = dict_of({{U"AB", d}, {U"BC", s}});
  const auto fwd = forward_max_match(U"ABC", dict);
  const auto bwd = backward_max_match(U"ABC", dict);
  CHECK(fwd.segments == std::vector<Segment>{{U"AB", d, 0}, {U"C", std::nullopt, 2}});
  CHECK(bwd.segments == std::vector<Segment>{{U"A", std::nullopt, 0}, {U"BC", s, 1}});
  // Equal segment counts: the backward result wins.
  CHECK(bdmm_segment(U"ABC", dict) == bwd);
}

TEST_CASE("bdmm keeps the direction with fewer segments") {
  // Forward: 研究/生命/起源 is not reachable; forward takes 研究生 first.
  const Dictionary dict = dict_of({{U"研究", e}, {U"研究生", d}, {U"生命", s}, {U"命", t}, {U"起源", b}});
  const auto fwd = forward_max_match(U"研究生命起源", dict);
  const auto bwd = backward_max_match(U"研究生命起源", dict);
  CHECK(fwd.size() == 3);  // 研究生 / 命 / 起源
  CHECK(bwd.size() == 3);  // 研究 / 生命 / 起源
  CHECK(bdmm_segment(U"研究生命起源", dict) == bwd);

  const Dictionary fewer_fwd = dict_of({{U"ABCD", d}, {U"CDE", s}});
  // Forward: ABCD / E (2). Backward: A / B / CDE (3).
  const auto seg = bdmm_segment(U"ABCDE", fewer_fwd);
  CHECK(seg == forward_max_match(U"ABCDE", fewer_fwd));
  CHECK(seg.size() == 2);
}

TEST_CASE("bdmm worked example and empty input") {
  const auto segs = bdmm_segment(U"双侧瞳孔", dict_of({{U"瞳孔", b}}));
  CHECK(segs.entity_count() == 1);
  CHECK(segs.segments.back().text == U"瞳孔");
  CHECK(bdmm_segment(U"", dict_of({{U"瞳孔", b}})).size() == 0);
}

TEST_CASE("multi-type surfaces: first type for segmentation, all for lookup") {
  const Dictionary dict = dict_of({{U"维生素C", t}, {U"维生素C", e}});
  const auto segs = bdmm_segment(U"缺乏维生素C", dict);
  CHECK(segs.segments.back() == Segment{U"维生素C", t, 2});
  CHECK(lookup_exact(U"维生素C", dict) == std::vector<EntityType>{t, e});
  CHECK(lookup_exact(U"维生素", dict).empty());
  CHECK(lookup_exact(U"", dict).empty());
}

TEST_CASE("segmenter properties on random inputs") {
  Rng rng(23);
  const std::u32string alphabet = U"ABCDE";
  for (int k = 0; k < 300; ++k) {
    Dictionary dict;
    const std::size_t n_entries = rng.below(8);
    for (std::size_t i = 0; i < n_entries; ++i) {
      std::u32string w;
      const std::size_t len = 1 + rng.below(4);
      for (std::size_t j = 0; j < len; ++j) w.push_back(alphabet[rng.below(alphabet.size())]);
      dict.add(w, type_from_code(static_cast<int>(rng.below(5))));
    }
    std::u32string text;
    const std::size_t n = rng.below(15);
    for (std::size_t j = 0; j < n; ++j) text.push_back(alphabet[rng.below(alphabet.size())]);

    const auto fwd = forward_max_match(text, dict);
    const auto bwd = backward_max_match(text, dict);
    const auto both = bdmm_segment(text, dict);
    check_tiling(fwd, text, dict);
    check_tiling(bwd, text, dict);
    check_tiling(both, text, dict);
    CHECK(both.size() == std::min(fwd.size(), bwd.size()));
    if (fwd.size() == bwd.size()) CHECK(both == bwd);
    CHECK(both.entity_count() <= std::max(fwd.entity_count(), bwd.entity_count()));
  }
}

TEST_CASE("text with no dictionary substring gives single None segments") {
  const Dictionary dict = dict_of({{U"XY", d}, {U"Z", s}});
  for (const auto& segs : {forward_max_match(U"ABCAB", dict), backward_max_match(U"ABCAB", dict),
                           bdmm_segment(U"ABCAB", dict)}) {
    CHECK(segs.size() == 5);
    CHECK(segs.entity_count() == 0);
  }
}

TEST_CASE("subsample_dictionary") {
  Dictionary dict;
  for (int k = 0; k < 40; ++k) dict.add(std::u32string(1, U'a' + k), type_from_code(k % 5));
  CHECK(subsample_dictionary(dict, 1.0, 7).entries() == dict.entries());
  const Dictionary half = subsample_dictionary(dict, 0.5, 7);
  const Dictionary quarter = subsample_dictionary(dict, 0.25, 7);
  CHECK(half.entry_count() == 20);
  CHECK(quarter.entry_count() == 10);
  for (const auto& [surface, type] : quarter.entries()) CHECK(half.find(surface) != nullptr);
  CHECK_THROWS_AS(subsample_dictionary(dict, 0.0, 7), StructureError);
  CHECK_THROWS_AS(subsample_dictionary(dict, 1.5, 7), StructureError);
}

TEST_CASE("fingerprint ignores order but not content") {
  const Dictionary a = dict_of({{U"瞳孔", b}, {U"维生素C", t}});
  const Dictionary c = dict_of({{U"维生素C", t}, {U"瞳孔", b}});
  const Dictionary other = dict_of({{U"维生素C", e}, {U"瞳孔", b}});
  CHECK(a.fingerprint() == c.fingerprint());
  CHECK(a.fingerprint() != other.fingerprint());
}
