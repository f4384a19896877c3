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
#include <vector>

#include "dictner/tensor.h"

namespace dictner::crf {

// Emissions are T x K. Transitions are (K+2) x (K+2): row/column K is the
// virtual start state and K+1 the end state. Entry (a, b) scores a -> b.

inline std::size_t start_state(std::size_t num_tags) { return num_tags; }
inline std::size_t end_state(std::size_t num_tags) { return num_tags + 1; }

Matrix make_transitions(std::size_t num_tags);

struct TagPath {
  std::vector<int> tags;
  double score = 0.0;
};

/// A(start, y_1) + sum_t emission(t, y_t) + sum_{t>1} A(y_{t-1}, y_t) + A(y_T, end).
double sequence_score(const Matrix& emissions, const Matrix& transitions,
                      std::span<const int> path);

/// Log of the summed exponentiated scores of all K^T paths. Zero for T = 0.
double forward_logz(const Matrix& emissions, const Matrix& transitions);

/// forward_logz - sequence_score(gold).
double nll(const Matrix& emissions, const Matrix& transitions, std::span<const int> gold);

/// Same value as nll(); additionally accumulates dL/d(emissions) into
/// `d_emissions` and dL/d(transitions) into `d_transitions` via
/// forward-backward marginals.
double nll_backward(const Matrix& emissions, const Matrix& transitions,
                    std::span<const int> gold, Matrix& d_emissions,
                    Matrix& d_transitions);

/// Highest-scoring path; ties resolve toward the lower tag code. When
/// `allowed` is non-null, transitions with allowed(a, b) == 0 are excluded.
TagPath viterbi_decode(const Matrix& emissions, const Matrix& transitions,
                       const Matrix* allowed = nullptr);

/// 0/1 matrix over the 21 BIEOS tags plus start/end marking the legal
/// transitions (B-x/I-x -> I-x/E-x only; everything else -> O, B-*, S-*).
const Matrix& bieos_allowed_transitions();

}  // namespace dictner::crf
