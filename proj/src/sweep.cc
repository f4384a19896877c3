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

#include "dictner/sweep.h"

#include <cstdio>

#include "dictner/error.h"

namespace dictner {

std::vector<SweepPoint> sweep_dictionary(std::span<const LabeledSentence> train_corpus,
                                         std::span<const LabeledSentence> test_corpus,
                                         const Dictionary& dict, const ModelConfig& config,
                                         std::span<const double> fractions,
                                         std::uint64_t subsample_seed) {
  std::vector<SweepPoint> out;
  for (double f : fractions) {
    const Dictionary sub = subsample_dictionary(dict, f, subsample_seed);
    const TrainResult trained = train(train_corpus, sub, config);
    out.push_back({f, evaluate(trained.model, test_corpus, sub)});
  }
  return out;
}

std::vector<SweepPoint> sweep_hidden(std::span<const LabeledSentence> train_corpus,
                                     std::span<const LabeledSentence> test_corpus,
                                     const Dictionary& dict, const ModelConfig& config,
                                     std::span<const std::size_t> sizes) {
  std::vector<SweepPoint> out;
  for (std::size_t size : sizes) {
    ModelConfig c = config;
    c.d_h = size;
    if (c.arch == ArchKind::kModelII) {
      if (size < 2) throw StructureError("Model-II hidden size must be >= 2");
      c.d_hx = c.d_hd = size / 2;
    }
    const TrainResult trained = train(train_corpus, dict, c);
    out.push_back({static_cast<double>(size), evaluate(trained.model, test_corpus, dict)});
  }
  return out;
}

std::string format_sweep(std::string_view axis, std::span<const SweepPoint> points) {
  std::string out(axis);
  out += "\tP\tR\tF1\n";
  char line[128];
  for (const auto& p : points) {
    const auto& c = p.report.overall;
    std::snprintf(line, sizeof line, "%g\t%.2f\t%.2f\t%.2f\n", p.value, 100.0 * c.precision(),
                  100.0 * c.recall(), 100.0 * c.f1());
    out += line;
  }
  return out;
}

}  // namespace dictner
