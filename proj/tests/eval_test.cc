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

#include <vector>

#include "doctest.h"
#include "dictner/error.h"
#include "dictner/eval.h"
#include "dictner/tensor.h"

using namespace dictner;

namespace {

using Spans = std::vector<std::vector<EntitySpan>>;

constexpr auto d = EntityType::kDisease;
constexpr auto s = EntityType::kSymptom;
constexpr auto b = EntityType::kBody;

}  // namespace

TEST_CASE("perfect prediction") {
  const Spans gold = {{{0, 2, d}, {3, 5, b}}, {{1, 4, s}}};
  const EvalReport r = micro_prf(gold, gold);
  CHECK(r.overall.precision() == 1.0);
  CHECK(r.overall.recall() == 1.0);
  CHECK(r.overall.f1() == 1.0);
}

TEST_CASE("one hit out of three predictions and two gold spans") {
  const Spans gold = {{{0, 2, d}, {4, 6, s}}};
  const Spans pred = {{{0, 2, d}, {2, 3, b}, {4, 5, s}}};
  const EvalReport r = micro_prf(gold, pred);
  CHECK(r.overall.true_positive == 1);
  CHECK(r.overall.precision() == doctest::Approx(1.0 / 3.0));
  CHECK(r.overall.recall() == doctest::Approx(0.5));
  CHECK(r.overall.f1() == doctest::Approx(0.4));
  const std::string table = format_report(r);
  CHECK(table.find("33.33") != std::string::npos);
  CHECK(table.find("50.00") != std::string::npos);
  CHECK(table.find("40.00") != std::string::npos);
}

TEST_CASE("right boundaries with the wrong type count twice") {
  const Spans gold = {{{0, 2, d}}};
  const Spans pred = {{{0, 2, s}}};
  const EvalReport r = micro_prf(gold, pred);
  CHECK(r.overall.true_positive == 0);
  CHECK(r.overall.predicted == 1);
  CHECK(r.overall.gold == 1);
  CHECK(r.per_type[static_cast<int>(d)].gold == 1);
  CHECK(r.per_type[static_cast<int>(s)].predicted == 1);
}

TEST_CASE("zero conventions") {
  PrfCounts none;
  CHECK(none.precision() == 0.0);
  CHECK(none.recall() == 0.0);
  CHECK(none.f1() == 0.0);
  const EvalReport r = micro_prf(Spans{{}}, Spans{{{0, 1, b}}});
  CHECK(r.overall.precision() == 0.0);
  CHECK(r.overall.f1() == 0.0);
  CHECK(format_report(r).find("0.00") != std::string::npos);
}

TEST_CASE("sentence counts must agree") {
  CHECK_THROWS_AS(micro_prf(Spans{{}, {}}, Spans{{}}), StructureError);
}

TEST_CASE("report table layout") {
  const std::string table = format_report(micro_prf(Spans{{{0, 1, b}}}, Spans{{{0, 1, b}}}));
  for (const char* row : {"disease", "symptom", "treatment", "exam", "body", "overall"}) {
    CHECK(table.find(row) != std::string::npos);
  }
  CHECK(table.find("100.00") != std::string::npos);
}

TEST_CASE("properties: symmetry, partition invariance, per-type sums") {
  Rng rng(3);
  auto random_spans = [&](std::size_t n) {
    std::vector<EntitySpan> out;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n; ++k) {
      pos += rng.below(3);
      const std::size_t len = 1 + rng.below(3);
      out.push_back({pos, pos + len, type_from_code(static_cast<int>(rng.below(5)))});
      pos += len;
    }
    return out;
  };
  for (int trial = 0; trial < 100; ++trial) {
    Spans gold, pred;
    for (int k = 0; k < 6; ++k) {
      gold.push_back(random_spans(rng.below(4)));
      // Predictions share a random prefix with gold so some spans match.
      auto p = gold.back();
      p.resize(rng.below(p.size() + 1));
      for (auto& extra : random_spans(rng.below(3))) {
        extra.start += 40;
        extra.end += 40;
        p.push_back(extra);
      }
      pred.push_back(p);
    }
    const EvalReport r = micro_prf(gold, pred);
    const EvalReport swapped = micro_prf(pred, gold);
    CHECK(swapped.overall.precision() == r.overall.recall());
    CHECK(swapped.overall.recall() == r.overall.precision());
    CHECK(swapped.overall.f1() == doctest::Approx(r.overall.f1()).epsilon(1e-15));

    std::size_t tp = 0;
    for (const auto& c : r.per_type) tp += c.true_positive;
    CHECK(tp == r.overall.true_positive);

    const Spans g1(gold.begin(), gold.begin() + 2), g2(gold.begin() + 2, gold.end());
    const Spans p1(pred.begin(), pred.begin() + 2), p2(pred.begin() + 2, pred.end());
    PrfCounts merged = micro_prf(g1, p1).overall;
    merged += micro_prf(g2, p2).overall;
    CHECK(merged.f1() == r.overall.f1());

    const double f1 = r.overall.f1();
    CHECK(f1 >= 0.0);
    CHECK(f1 <= 1.0);
  }
}
