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
#include <cstdint>
#include <vector>

#include "dictner/corpus.h"
#include "dictner/dictionary.h"

namespace dictner {

/// Parameters of the synthetic clinical-style corpus. Entity surfaces are
/// random strings over a shared character pool, embedded in fixed carrier
/// templates; several templates place two entities side by side so that
/// boundaries are not recoverable from context alone.
struct SyntheticConfig {
  std::size_t train_sentences = 50;
  std::size_t test_sentences = 0;
  std::size_t entities_per_type = 6;   // surfaces available to training
  std::size_t unseen_per_type = 0;     // surfaces only used in the test split
  double oov_rate = 0.0;               // share of test entity slots drawn from unseen surfaces
  std::size_t char_pool = 12;          // distinct characters used to spell entities
  std::size_t templates = 0;           // 0: use every carrier template
  std::uint64_t seed = 1;
};

struct SyntheticData {
  std::vector<LabeledSentence> train;
  std::vector<LabeledSentence> test;
  /// Every surface generated, seen and unseen.
  Dictionary dict;
};

SyntheticData generate_synthetic(const SyntheticConfig& config);

}  // namespace dictner
