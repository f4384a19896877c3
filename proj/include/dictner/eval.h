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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dictner/corpus.h"

namespace dictner {

struct PrfCounts {
  std::size_t true_positive = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  /// 0 when nothing was predicted.
  double precision() const;
  /// 0 when there is no gold entity.
  double recall() const;
  /// 0 when precision + recall is 0.
  double f1() const;

  PrfCounts& operator+=(const PrfCounts& o);
};

struct EvalReport {
  std::array<PrfCounts, kNumEntityTypes> per_type{};
  PrfCounts overall;
};

/// Exact-match micro averaging: a predicted span counts only if start, end
/// and type all equal a gold span of the same sentence. Throws
/// StructureError if the sentence counts differ.
EvalReport micro_prf(std::span<const std::vector<EntitySpan>> gold,
                     std::span<const std::vector<EntitySpan>> predicted);

/// Fixed-width table: one row per type plus "overall"; P, R, F1 as
/// percentages with two decimals.
std::string format_report(const EvalReport& report);

}  // namespace dictner
