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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dictner {

/// Clinical entity kinds. The integer codes are stable and appear in model
/// files and feature layouts.
enum class EntityType : std::uint8_t {
  kDisease = 0,
  kSymptom = 1,
  kTreatment = 2,
  kExam = 3,
  kBody = 4,
};

inline constexpr int kNumEntityTypes = 5;

/// Single-letter name: d, s, t, e, b.
char type_letter(EntityType type);
std::optional<EntityType> type_from_letter(std::string_view letter);
inline EntityType type_from_code(int code) {
  return static_cast<EntityType>(code);
}

/// Position of a character inside an entity.
enum class Position : std::uint8_t { kBegin = 0, kInside = 1, kEnd = 2, kSingle = 3 };

/// A BIEOS tag. Code 0 is O; the entity tags occupy 1..20 as
/// 1 + 4 * type + position.
class Tag {
 public:
  static constexpr int kCount = 1 + 4 * kNumEntityTypes;

  constexpr Tag() = default;
  constexpr Tag(Position pos, EntityType type)
      : code_(static_cast<std::uint8_t>(1 + 4 * static_cast<int>(type) +
                                        static_cast<int>(pos))) {}

  static constexpr Tag outside() { return Tag(); }
  /// Throws StructureError for codes outside [0, kCount).
  static Tag from_code(int code);
  static std::optional<Tag> parse(std::string_view text);

  constexpr int code() const { return code_; }
  constexpr bool is_outside() const { return code_ == 0; }
  /// Only meaningful when !is_outside().
  constexpr Position position() const {
    return static_cast<Position>((code_ - 1) % 4);
  }
  constexpr EntityType type() const {
    return static_cast<EntityType>((code_ - 1) / 4);
  }
  std::string str() const;

  friend constexpr auto operator<=>(Tag, Tag) = default;

 private:
  std::uint8_t code_ = 0;
};

/// Inclusive character range [start, end] carrying one entity type.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  EntityType type = EntityType::kDisease;

  std::size_t length() const { return end - start + 1; }
  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

struct LabeledSentence {
  std::u32string chars;
  std::optional<std::vector<Tag>> tags;

  std::size_t size() const { return chars.size(); }
  bool tagged() const { return tags.has_value(); }
  friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

/// Character to row-index map for the embedding table. Index 0 is padding,
/// index 1 stands for every character never seen at build time.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary() = default;

  /// Returns the index of `ch`, inserting it if new.
  int add(char32_t ch);
  /// Unknown characters map to kUnk.
  int index(char32_t ch) const;
  bool contains(char32_t ch) const { return index_.count(ch) != 0; }
  /// Total rows including PAD and UNK.
  std::size_t size() const { return chars_.size() + 2; }
  /// Real characters in index order (index = position + 2).
  const std::u32string& chars() const { return chars_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.chars_ == b.chars_;
  }

 private:
  std::u32string chars_;
  std::unordered_map<char32_t, int> index_;
};

/// Reads the two-column corpus format. Tags are validated as BIEOS
/// sequences; errors carry the 1-based line number.
std::vector<LabeledSentence> parse_corpus(std::istream& in);
std::vector<LabeledSentence> parse_corpus_file(const std::string& path);

void write_corpus(std::ostream& out, std::span<const LabeledSentence> sentences);

/// Reads one sentence per line of raw UTF-8 text. Blank lines are skipped.
std::vector<LabeledSentence> read_plain_text(std::istream& in);

inline constexpr std::u32string_view kDefaultClauseDelimiters = U"，、；。！？";

/// Splits after every untagged (or O-tagged) delimiter. The delimiter stays
/// with the clause it closes.
std::vector<LabeledSentence> split_clauses(
    const LabeledSentence& sentence,
    std::u32string_view delimiters = kDefaultClauseDelimiters);

/// Strict BIEOS decoding. Throws StructureError naming the first bad index.
std::vector<EntitySpan> tags_to_spans(std::span<const Tag> tags);

/// Decodes arbitrary tag sequences: an unclosed B/I run becomes a span ending
/// at its last character, a stray I or E opens a new span.
std::vector<EntitySpan> tags_to_spans_lenient(std::span<const Tag> tags);

/// Spans may arrive in any order; they must not overlap and must lie in
/// [0, n).
std::vector<Tag> spans_to_tags(std::span<const EntitySpan> spans, std::size_t n);

/// Characters receive indices in first-occurrence order.
Vocabulary build_vocab(std::span<const LabeledSentence> sentences);

}  // namespace dictner
