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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dictner/corpus.h"
#include "dictner/dictionary.h"
#include "dictner/eval.h"
#include "dictner/model.h"

namespace dictner {

struct SweepPoint {
  double value = 0.0;  // dictionary fraction or hidden size
  EvalReport report;
};

/// Retrains on dictionaries subsampled to each fraction and scores `test`.
/// Subsets are nested: every fraction keeps a prefix of one seeded
/// permutation of the entries.
std::vector<SweepPoint> sweep_dictionary(std::span<const LabeledSentence> train_corpus,
                                         std::span<const LabeledSentence> test_corpus,
                                         const Dictionary& dict, const ModelConfig& config,
                                         std::span<const double> fractions,
                                         std::uint64_t subsample_seed);

/// Retrains with each hidden size. Model-II splits the size evenly between
/// its two encoders so the scoring-layer width stays 2 * size.
std::vector<SweepPoint> sweep_hidden(std::span<const LabeledSentence> train_corpus,
                                     std::span<const LabeledSentence> test_corpus,
                                     const Dictionary& dict, const ModelConfig& config,
                                     std::span<const std::size_t> sizes);

/// Tab-separated table with a header row: axis, P, R, F1 (percentages).
std::string format_sweep(std::string_view axis, std::span<const SweepPoint> points);

}  // namespace dictner
