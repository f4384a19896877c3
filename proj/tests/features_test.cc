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

#include <string>
#include <vector>

#include "doctest.h"
#include "dictner/error.h"
#include "dictner/features.h"

using namespace dictner;

namespace {

constexpr auto b = EntityType::kBody;
constexpr auto s = EntityType::kSymptom;
constexpr std::u32string_view kAbdomen = U"腹平坦，未见腹壁静脉曲张。";

Dictionary abdomen_dict() {
  Dictionary d;
  d.add(U"腹", b);
  d.add(U"腹壁", b);
  d.add(U"静脉曲张", s);
  return d;
}

template <class L>
std::vector<std::string> names(const std::vector<L>& labels) {
  std::vector<std::string> out;
  for (const auto& l : labels) out.push_back(l.str());
  return out;
}

int ngram_bit(int j, EntityType k) { return j * kNumEntityTypes + static_cast<int>(k); }

}  // namespace

TEST_CASE("scheme widths and inventories") {
  CHECK(feature_width(FeatureScheme::kNGram, 7) == 40);
  CHECK(feature_width(FeatureScheme::kPietOneHot, 7) == 6);
  CHECK(feature_width(FeatureScheme::kPietEmbed, 7) == 7);
  CHECK(feature_width(FeatureScheme::kPdetOneHot, 7) == 21);
  CHECK(feature_width(FeatureScheme::kPdetEmbed, 7) == 7);
  CHECK(label_inventory(FeatureScheme::kPietEmbed) == 6);
  CHECK(label_inventory(FeatureScheme::kPdetEmbed) == 21);
  for (auto scheme : {FeatureScheme::kNGram, FeatureScheme::kPietOneHot, FeatureScheme::kPietEmbed,
                      FeatureScheme::kPdetOneHot, FeatureScheme::kPdetEmbed}) {
    CHECK(parse_scheme(scheme_name(scheme)) == scheme);
  }
  CHECK_FALSE(parse_scheme("bigram").has_value());
}

TEST_CASE("PIET row of the tag sequence example") {
  const std::vector<std::string> want = {"b", "None", "None", "None", "None", "None", "b",
                                         "b", "s", "s", "s", "s", "None"};
  CHECK(names(piet_labels(kAbdomen, abdomen_dict())) == want);
}

TEST_CASE("PDET row of the tag sequence example") {
  const std::vector<std::string> want = {"S-b", "None", "None", "None", "None", "None", "B-b",
                                         "E-b", "B-s", "I-s", "I-s", "E-s", "None"};
  CHECK(names(pdet_labels(kAbdomen, abdomen_dict())) == want);
}

TEST_CASE("label extractors: trivial cases") {
  const Dictionary empty;
  for (const auto& l : piet_labels(kAbdomen, empty)) CHECK(l.is_none());
  for (const auto& l : pdet_labels(kAbdomen, empty)) CHECK(l.is_none());

  Dictionary one;
  one.add(U"肺炎", EntityType::kDisease);
  CHECK(names(piet_labels(U"肺炎", one)) == std::vector<std::string>{"d", "d"});
  CHECK(names(pdet_labels(U"肺炎", one)) == std::vector<std::string>{"B-d", "E-d"});
  CHECK(piet_labels(U"", one).empty());
}

TEST_CASE("ngram_features: body part window") {
  Dictionary d;
  d.add(U"腹壁", b);
  const auto feats = ngram_features(U"腹壁静脉", d);
  REQUIRE(feats.size() == 4);
  for (int i = 0; i < 4; ++i) {
    for (int idx = 0; idx < kNgramWidth; ++idx) {
      const bool on = (i == 0 && idx == ngram_bit(1, b)) || (i == 1 && idx == ngram_bit(0, b));
      CHECK(feats[i][idx] == (on ? 1 : 0));
    }
  }
}

TEST_CASE("ngram_features: empty dictionary and multi-type surface") {
  for (const auto& f : ngram_features(kAbdomen, Dictionary{})) {
    for (auto bit : f) CHECK(bit == 0);
  }
  Dictionary d;
  d.add(U"维生素C", EntityType::kTreatment);
  d.add(U"维生素C", EntityType::kExam);
  const auto feats = ngram_features(U"维生素C", d);
  // Position 0: the 4-gram starting at i is template 5.
  int set = 0;
  for (auto bit : feats[0]) set += bit;
  CHECK(set == 2);
  CHECK(feats[0][ngram_bit(5, EntityType::kTreatment)] == 1);
  CHECK(feats[0][ngram_bit(5, EntityType::kExam)] == 1);
  // Position 3: the 4-gram ending at i is template 4.
  CHECK(feats[3][ngram_bit(4, EntityType::kTreatment)] == 1);
  CHECK(feats[3][ngram_bit(4, EntityType::kExam)] == 1);
}

TEST_CASE("ngram_features matches a brute-force window scan") {
  Rng rng(5);
  const std::u32string alphabet = U"ABCD";
  for (int trial = 0; trial < 200; ++trial) {
    Dictionary dict;
    for (std::size_t n = rng.below(10), i = 0; i < n; ++i) {
      std::u32string w;
      for (std::size_t len = 1 + rng.below(5), j = 0; j < len; ++j) w.push_back(alphabet[rng.below(4)]);
      dict.add(w, type_from_code(static_cast<int>(rng.below(5))));
    }
    std::u32string text;
    for (std::size_t n = rng.below(12), j = 0; j < n; ++j) text.push_back(alphabet[rng.below(4)]);
    const auto feats = ngram_features(text, dict);
    REQUIRE(feats.size() == text.size());
    const long T = static_cast<long>(text.size());
    for (long i = 0; i < T; ++i) {
      NgramFeature want{};
      for (int len = 2; len <= 5; ++len) {
        const long starts[2] = {i - len + 1, i};
        for (int side = 0; side < 2; ++side) {
          const long lo = starts[side];
          if (lo < 0 || lo + len > T) continue;
          for (auto type : lookup_exact(std::u32string_view(text).substr(lo, len), dict)) {
            want[ngram_bit((len - 2) * 2 + side, type)] = 1;
          }
        }
      }
      CHECK(feats[i] == want);
    }
  }
}

TEST_CASE("properties: stripped PDET equals PIET; n-gram locality") {
  Rng rng(11);
  const std::u32string alphabet = U"ABCDE";
  for (int trial = 0; trial < 300; ++trial) {
    Dictionary dict;
    for (std::size_t n = rng.below(8), i = 0; i < n; ++i) {
      std::u32string w;
      for (std::size_t len = 1 + rng.below(5), j = 0; j < len; ++j) w.push_back(alphabet[rng.below(5)]);
      dict.add(w, type_from_code(static_cast<int>(rng.below(5))));
    }
    std::u32string text;
    for (std::size_t n = rng.below(16), j = 0; j < n; ++j) text.push_back(alphabet[rng.below(5)]);

    const auto piet = piet_labels(text, dict);
    const auto pdet = pdet_labels(text, dict);
    REQUIRE(piet.size() == pdet.size());
    for (std::size_t i = 0; i < piet.size(); ++i) CHECK(pdet[i].strip_position() == piet[i]);

    if (text.size() < 6) continue;
    const auto before = ngram_features(text, dict);
    const std::size_t edit = rng.below(text.size());
    std::u32string changed = text;
    changed[edit] = U'Z';
    const auto after = ngram_features(changed, dict);
    for (std::size_t i = 0; i < text.size(); ++i) {
      const std::size_t dist = i > edit ? i - edit : edit - i;
      if (dist > 4) CHECK(before[i] == after[i]);
    }
  }
}

TEST_CASE("encode") {
  const Dictionary dict = abdomen_dict();
  SUBCASE("one-hot PIET") {
    const auto f = encode(std::vector<PietLabel>{PietLabel(b)}, FeatureScheme::kPietOneHot);
    REQUIRE(f.dense.rows() == 1);
    REQUIRE(f.dense.cols() == 6);
    double sum = 0;
    for (double v : f.dense.row(0)) sum += v;
    CHECK(sum == 1.0);
    CHECK(f.dense(0, PietLabel(b).code()) == 1.0);
  }
  SUBCASE("PDET None under embedding is index 0") {
    const auto f = encode(std::vector<PdetLabel>{PdetLabel{}}, FeatureScheme::kPdetEmbed);
    CHECK(f.indices == std::vector<int>{0});
    CHECK(f.length() == 1);
  }
  SUBCASE("n-gram pass-through") {
    const auto bits = ngram_features(U"腹壁静脉", dict);
    const auto f = encode(bits, FeatureScheme::kNGram);
    REQUIRE(f.dense.cols() == 40);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      for (int k = 0; k < kNgramWidth; ++k) CHECK(f.dense(i, k) == bits[i][k]);
    }
  }
  SUBCASE("extract_features widths") {
    CHECK(extract_features(kAbdomen, dict, FeatureScheme::kPdetOneHot).dense.cols() == 21);
    const auto pdet = extract_features(kAbdomen, dict, FeatureScheme::kPdetEmbed);
    CHECK(pdet.indices.size() == kAbdomen.size());
    CHECK(pdet.indices[0] == Tag::parse("S-b")->code());
  }
  SUBCASE("mismatches") {
    CHECK_THROWS_AS(encode(std::vector<PietLabel>{}, FeatureScheme::kNGram), StructureError);
    CHECK_THROWS_AS(encode(std::vector<PdetLabel>{}, FeatureScheme::kPietEmbed), StructureError);
    CHECK_THROWS_AS(encode(std::vector<NgramFeature>{}, FeatureScheme::kPdetOneHot), StructureError);
  }
  SUBCASE("label names") {
    CHECK(label_name(FeatureScheme::kPietEmbed, 0) == "None");
    CHECK(label_name(FeatureScheme::kPdetEmbed, 1) == "B-d");
  }
}
