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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dictner/corpus.h"
#include "dictner/dictionary.h"
#include "dictner/tensor.h"

namespace dictner {

enum class FeatureScheme { kNGram, kPietOneHot, kPietEmbed, kPdetOneHot, kPdetEmbed };

/// CLI spelling: ngram, piet-onehot, piet-embed, pdet-onehot, pdet-embed.
std::string_view scheme_name(FeatureScheme scheme);
std::optional<FeatureScheme> parse_scheme(std::string_view name);
bool is_embedding_scheme(FeatureScheme scheme);

/// Width of d_i; embedding schemes report `embed_dim`.
std::size_t feature_width(FeatureScheme scheme, std::size_t embed_dim);
/// Rows of the label embedding table (6 or 21), 0 for dense schemes.
std::size_t label_inventory(FeatureScheme scheme);

inline constexpr int kNgramTemplates = 8;
inline constexpr int kNgramWidth = kNgramTemplates * kNumEntityTypes;

/// Bit (j, k) at index j * 5 + k. Templates in order: 2-gram ending at i,
/// 2-gram starting at i, 3-gram ending, 3-gram starting, ... 5-gram starting.
using NgramFeature = std::array<std::uint8_t, kNgramWidth>;

/// Dictionary entity type covering a character, or none. Code 0 is None,
/// 1 + type otherwise.
class PietLabel {
 public:
  static constexpr int kCount = 1 + kNumEntityTypes;
  constexpr PietLabel() = default;
  constexpr explicit PietLabel(EntityType t) : code_(static_cast<std::uint8_t>(1 + static_cast<int>(t))) {}
  static PietLabel from_code(int code);

  constexpr int code() const { return code_; }
  constexpr bool is_none() const { return code_ == 0; }
  std::string str() const;
  friend constexpr auto operator<=>(PietLabel, PietLabel) = default;

 private:
  std::uint8_t code_ = 0;
};

/// PIET plus the character's B/I/E/S position in the matched entity. Shares
/// the code layout of Tag with None in place of O.
class PdetLabel {
 public:
  static constexpr int kCount = Tag::kCount;
  constexpr PdetLabel() = default;
  constexpr PdetLabel(Position pos, EntityType t) : tag_(pos, t) {}
  static PdetLabel from_code(int code);

  constexpr int code() const { return tag_.code(); }
  constexpr bool is_none() const { return tag_.is_outside(); }
  PietLabel strip_position() const;
  std::string str() const;
  friend constexpr auto operator<=>(PdetLabel, PdetLabel) = default;

 private:
  Tag tag_;
};

std::vector<NgramFeature> ngram_features(std::u32string_view chars, const Dictionary& dict);
std::vector<PietLabel> piet_labels(std::u32string_view chars, const Dictionary& dict);
std::vector<PdetLabel> pdet_labels(std::u32string_view chars, const Dictionary& dict);

/// Model-ready features of one sentence: a dense T x width matrix for the
/// n-gram and one-hot schemes, label indices for the embedding schemes.
struct SentenceFeatures {
  FeatureScheme scheme = FeatureScheme::kNGram;
  Matrix dense;
  std::vector<int> indices;

  std::size_t length() const { return is_embedding_scheme(scheme) ? indices.size() : dense.rows(); }
};

/// Throws StructureError when the input kind does not belong to `scheme`.
SentenceFeatures encode(std::span<const NgramFeature> bits, FeatureScheme scheme);
SentenceFeatures encode(std::span<const PietLabel> labels, FeatureScheme scheme);
SentenceFeatures encode(std::span<const PdetLabel> labels, FeatureScheme scheme);

/// Runs the extractor that belongs to `scheme` and encodes the result.
SentenceFeatures extract_features(std::u32string_view chars, const Dictionary& dict,
                                  FeatureScheme scheme);

/// Name of embedding row `index` for a label scheme ("None", "b", "S-b", ...).
std::string label_name(FeatureScheme scheme, int index);

}  // namespace dictner
