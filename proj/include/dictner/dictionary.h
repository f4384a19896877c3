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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dictner/corpus.h"

namespace dictner {

/// Surface string to entity types. A surface may carry several types; they
/// are kept in insertion (file) order.
class Dictionary {
 public:
  using Entry = std::pair<std::u32string, EntityType>;

  /// Returns false (and stores nothing) when the pair is already present.
  /// Throws StructureError on an empty surface.
  bool add(std::u32string_view surface, EntityType type);

  /// Types registered for `surface`, or nullptr.
  const std::vector<EntityType>* find(std::u32string_view surface) const;

  /// Length in characters of the longest surface; 0 when empty.
  std::size_t max_len() const { return max_len_; }
  std::size_t surface_count() const { return types_.size(); }
  /// Number of (surface, type) pairs.
  std::size_t entry_count() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// Order-independent 64-bit hash of the entry set.
  std::uint64_t fingerprint() const;

 private:
  std::unordered_map<std::u32string, std::vector<EntityType>> types_;
  std::vector<Entry> entries_;
  std::size_t max_len_ = 0;
};

/// Parses `<surface>TAB<letter>` lines; `#` lines and blank lines are
/// skipped. Duplicate pairs are kept once and reported through `warnings`.
Dictionary load_dictionary(std::istream& in,
                           std::vector<std::string>* warnings = nullptr);
Dictionary load_dictionary_file(const std::string& path,
                                std::vector<std::string>* warnings = nullptr);
void write_dictionary(std::ostream& out, const Dictionary& dict);

/// Keeps round(fraction * entry_count) pairs chosen by a seeded shuffle.
/// Smaller fractions under the same seed select prefixes of larger ones.
Dictionary subsample_dictionary(const Dictionary& dict, double fraction,
                                std::uint64_t seed);

struct Segment {
  std::u32string text;
  std::optional<EntityType> type;  // nullopt: unmatched single character
  std::size_t start = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentList {
  std::vector<Segment> segments;

  std::size_t size() const { return segments.size(); }
  std::size_t entity_count() const;
  friend bool operator==(const SegmentList&, const SegmentList&) = default;
};

/// Greedy longest match scanning left to right. Matched segments take the
/// first type of their surface.
SegmentList forward_max_match(std::u32string_view text, const Dictionary& dict);

/// Greedy longest match scanning right to left; segments are returned in
/// text order.
SegmentList backward_max_match(std::u32string_view text, const Dictionary& dict);

/// Runs both directions and keeps the one with fewer segments. Ties keep the
/// backward result.
SegmentList bdmm_segment(std::u32string_view text, const Dictionary& dict);

/// All types registered for `text` (empty when absent).
std::vector<EntityType> lookup_exact(std::u32string_view text, const Dictionary& dict);

}  // namespace dictner
