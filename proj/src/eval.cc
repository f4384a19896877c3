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

#include "dictner/eval.h"

#include <algorithm>
#include <cstdio>

#include "dictner/error.h"

namespace dictner {

double PrfCounts::precision() const {
  return predicted == 0 ? 0.0 : static_cast<double>(true_positive) / static_cast<double>(predicted);
}

double PrfCounts::recall() const {
  return gold == 0 ? 0.0 : static_cast<double>(true_positive) / static_cast<double>(gold);
}

double PrfCounts::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

PrfCounts& PrfCounts::operator+=(const PrfCounts& o) {
  true_positive += o.true_positive;
  predicted += o.predicted;
  gold += o.gold;
  return *this;
}

EvalReport micro_prf(std::span<const std::vector<EntitySpan>> gold,
                     std::span<const std::vector<EntitySpan>> predicted) {
  if (gold.size() != predicted.size()) {
    throw StructureError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                         std::to_string(predicted.size()));
  }
  EvalReport report;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    std::vector<EntitySpan> g = gold[s];
    std::sort(g.begin(), g.end());
    for (const auto& span : g) ++report.per_type[static_cast<int>(span.type)].gold;
    for (const auto& span : predicted[s]) {
      auto& c = report.per_type[static_cast<int>(span.type)];
      ++c.predicted;
      if (std::binary_search(g.begin(), g.end(), span)) ++c.true_positive;
    }
  }
  for (const auto& c : report.per_type) report.overall += c;
  return report;
}

std::string format_report(const EvalReport& report) {
  static constexpr const char* kNames[] = {"disease", "symptom", "treatment", "exam", "body"};
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %8s %8s %8s\n", "type", "P", "R", "F1");
  out += line;
  auto row = [&](const char* name, const PrfCounts& c) {
    std::snprintf(line, sizeof line, "%-10s %8.2f %8.2f %8.2f\n", name, 100.0 * c.precision(),
                  100.0 * c.recall(), 100.0 * c.f1());
    out += line;
  };
  for (int k = 0; k < kNumEntityTypes; ++k) row(kNames[k], report.per_type[k]);
  row("overall", report.overall);
  return out;
}

}  // namespace dictner
