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

#include "dictner/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "dictner/error.h"
#include "dictner/utf8.h"

namespace dictner {

namespace {

constexpr std::string_view kLetters = "dsteb";  // indexed by EntityType code
constexpr std::string_view kPositions = "BIES";

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

char type_letter(EntityType type) { return kLetters[static_cast<int>(type)]; }

std::optional<EntityType> type_from_letter(std::string_view letter) {
  if (letter.size() != 1) return std::nullopt;
  switch (letter[0]) {
    case 'd': return EntityType::kDisease;
    case 's': return EntityType::kSymptom;
    case 't': return EntityType::kTreatment;
    case 'e': return EntityType::kExam;
    case 'b': return EntityType::kBody;
    default: return std::nullopt;
  }
}

Tag Tag::from_code(int code) {
  if (code < 0 || code >= kCount) {
    throw StructureError("tag code " + std::to_string(code) + " out of range");
  }
  Tag t;
  t.code_ = static_cast<std::uint8_t>(code);
  return t;
}

std::optional<Tag> Tag::parse(std::string_view text) {
  if (text == "O") return Tag::outside();
  if (text.size() != 3 || text[1] != '-') return std::nullopt;
  const auto pos = kPositions.find(text[0]);
  const auto type = type_from_letter(text.substr(2));
  if (pos == std::string_view::npos || !type) return std::nullopt;
  return Tag(static_cast<Position>(pos), *type);
}

std::string Tag::str() const {
  if (is_outside()) return "O";
  std::string s;
  s += kPositions[static_cast<int>(position())];
  s += '-';
  s += type_letter(type());
  return s;
}

int Vocabulary::add(char32_t ch) {
  auto [it, inserted] = index_.try_emplace(ch, static_cast<int>(chars_.size()) + 2);
  if (inserted) chars_.push_back(ch);
  return it->second;
}

int Vocabulary::index(char32_t ch) const {
  auto it = index_.find(ch);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<LabeledSentence> parse_corpus(std::istream& in) {
  std::vector<LabeledSentence> out;
  std::optional<bool> file_tagged;

  LabeledSentence cur;
  std::vector<Tag> tags;
  std::vector<std::size_t> lines;  // source line of each character
  std::optional<bool> sent_tagged;

  auto flush = [&] {
    if (cur.chars.empty()) return;
    if (*sent_tagged) {
      try {
        tags_to_spans(tags);
      } catch (const StructureError& e) {
        // Map the offending index back to a line for the message.
        std::size_t at = lines.back();
        const std::string msg = e.what();
        const auto p = msg.find("index ");
        if (p != std::string::npos) {
          const std::size_t idx = std::stoul(msg.substr(p + 6));
          if (idx < lines.size()) at = lines[idx];
        }
        throw DataError("invalid tag sequence: " + msg, at);
      }
      cur.tags = std::move(tags);
    }
    out.push_back(std::move(cur));
    cur = LabeledSentence{};
    tags.clear();
    lines.clear();
    sent_tagged.reset();
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) {
      flush();
      continue;
    }
    std::string_view view(line);
    const auto tab = view.find('\t');
    std::string_view char_col = view.substr(0, tab);
    std::optional<std::string_view> tag_col;
    if (tab != std::string_view::npos) {
      tag_col = view.substr(tab + 1);
      if (tag_col->find('\t') != std::string_view::npos) {
        throw DataError("expected at most 2 tab-separated columns", lineno);
      }
    }
    const std::u32string ch = utf8::decode(char_col);
    if (ch.size() != 1) {
      throw DataError("first column must hold exactly one character", lineno);
    }
    const bool has_tag = tag_col.has_value();
    if (sent_tagged && *sent_tagged != has_tag) {
      throw DataError("tag column present on some lines of the sentence but not others",
                      lineno);
    }
    if (file_tagged && *file_tagged != has_tag) {
      throw DataError("tag column must be present in all sentences or none", lineno);
    }
    sent_tagged = has_tag;
    file_tagged = has_tag;
    if (has_tag) {
      const auto tag = Tag::parse(*tag_col);
      if (!tag) throw DataError("unknown tag '" + std::string(*tag_col) + "'", lineno);
      tags.push_back(*tag);
    }
    cur.chars.push_back(ch[0]);
    lines.push_back(lineno);
  }
  flush();
  return out;
}

std::vector<LabeledSentence> parse_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path);
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const LabeledSentence> sentences) {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.chars.size(); ++i) {
      out << utf8::encode(s.chars[i]);
      if (s.tags) out << '\t' << (*s.tags)[i].str();
      out << '\n';
    }
    out << '\n';
  }
}

std::vector<LabeledSentence> read_plain_text(std::istream& in) {
  std::vector<LabeledSentence> out;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    out.push_back({utf8::decode(line), std::nullopt});
  }
  return out;
}

std::vector<LabeledSentence> split_clauses(const LabeledSentence& sentence,
                                           std::u32string_view delimiters) {
  std::vector<LabeledSentence> out;
  const std::size_t n = sentence.chars.size();
  std::size_t begin = 0;
  auto emit = [&](std::size_t end) {
    LabeledSentence clause;
    clause.chars = sentence.chars.substr(begin, end - begin);
    if (sentence.tags) {
      clause.tags.emplace(sentence.tags->begin() + begin, sentence.tags->begin() + end);
    }
    out.push_back(std::move(clause));
    begin = end;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (delimiters.find(sentence.chars[i]) == std::u32string_view::npos) continue;
    if (sentence.tags && !(*sentence.tags)[i].is_outside()) continue;
    if (i + 1 < n) emit(i + 1);
  }
  if (begin < n || out.empty()) emit(n);
  return out;
}

std::vector<EntitySpan> tags_to_spans(std::span<const Tag> tags) {
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;
  auto fail = [](std::size_t i, const std::string& why) {
    throw StructureError("invalid BIEOS transition at index " + std::to_string(i) + ": " + why);
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag t = tags[i];
    if (t.is_outside()) {
      if (open) fail(i, "O inside an open entity");
      continue;
    }
    switch (t.position()) {
      case Position::kBegin:
        if (open) fail(i, "B inside an open entity");
        open = EntitySpan{i, i, t.type()};
        break;
      case Position::kInside:
      case Position::kEnd:
        if (!open) fail(i, t.str() + " without a preceding B");
        if (open->type != t.type()) fail(i, t.str() + " continues an entity of another type");
        if (t.position() == Position::kEnd) {
          open->end = i;
          spans.push_back(*open);
          open.reset();
        }
        break;
      case Position::kSingle:
        if (open) fail(i, "S inside an open entity");
        spans.push_back({i, i, t.type()});
        break;
    }
  }
  if (open) fail(tags.size() - 1, "entity not closed by E");
  return spans;
}

std::vector<EntitySpan> tags_to_spans_lenient(std::span<const Tag> tags) {
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;
  auto close = [&] {
    if (open) spans.push_back(*open);
    open.reset();
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const Tag t = tags[i];
    if (t.is_outside()) {
      close();
      continue;
    }
    const bool continues = open && open->type == t.type();
    switch (t.position()) {
      case Position::kBegin:
        close();
        open = EntitySpan{i, i, t.type()};
        break;
      case Position::kInside:
        if (continues) {
          open->end = i;
        } else {
          close();
          open = EntitySpan{i, i, t.type()};
        }
        break;
      case Position::kEnd:
        if (continues) {
          open->end = i;
          close();
        } else {
          close();
          spans.push_back({i, i, t.type()});
        }
        break;
      case Position::kSingle:
        close();
        spans.push_back({i, i, t.type()});
        break;
    }
  }
  close();
  return spans;
}

std::vector<Tag> spans_to_tags(std::span<const EntitySpan> spans, std::size_t n) {
  std::vector<EntitySpan> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Tag> tags(n);
  std::size_t next_free = 0;
  for (const auto& s : sorted) {
    if (s.start > s.end || s.end >= n) {
      throw StructureError("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                           "] outside sentence of length " + std::to_string(n));
    }
    if (s.start < next_free) {
      throw StructureError("overlapping spans at index " + std::to_string(s.start));
    }
    if (s.start == s.end) {
      tags[s.start] = Tag(Position::kSingle, s.type);
    } else {
      tags[s.start] = Tag(Position::kBegin, s.type);
      for (std::size_t i = s.start + 1; i < s.end; ++i) tags[i] = Tag(Position::kInside, s.type);
      tags[s.end] = Tag(Position::kEnd, s.type);
    }
    next_free = s.end + 1;
  }
  return tags;
}

Vocabulary build_vocab(std::span<const LabeledSentence> sentences) {
  Vocabulary v;
  for (const auto& s : sentences)
    for (char32_t ch : s.chars) v.add(ch);
  return v;
}

}  // namespace dictner
