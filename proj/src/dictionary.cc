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

#include "dictner/dictionary.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "dictner/error.h"
#include "dictner/tensor.h"
#include "dictner/utf8.h"

namespace dictner {

bool Dictionary::add(std::u32string_view surface, EntityType type) {
  if (surface.empty()) throw StructureError("dictionary surface must not be empty");
  auto& types = types_[std::u32string(surface)];
  if (std::find(types.begin(), types.end(), type) != types.end()) return false;
  types.push_back(type);
  entries_.emplace_back(surface, type);
  max_len_ = std::max(max_len_, surface.size());
  return true;
}

const std::vector<EntityType>* Dictionary::find(std::u32string_view surface) const {
  if (surface.empty() || surface.size() > max_len_) return nullptr;
  auto it = types_.find(std::u32string(surface));
  return it == types_.end() ? nullptr : &it->second;
}

std::uint64_t Dictionary::fingerprint() const {
  std::vector<std::string> lines;
  lines.reserve(entries_.size());
  for (const auto& [surface, type] : entries_) {
    lines.push_back(utf8::encode(surface) + '\t' + type_letter(type) + '\n');
  }
  std::sort(lines.begin(), lines.end());
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& l : lines) {
    for (unsigned char c : l) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

Dictionary load_dictionary(std::istream& in, std::vector<std::string>* warnings) {
  Dictionary dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("expected <surface>TAB<type>", lineno);
    const std::string_view letter = std::string_view(line).substr(tab + 1);
    const auto type = type_from_letter(letter);
    if (!type) throw DataError("bad entity type '" + std::string(letter) + "'", lineno);
    if (tab == 0) throw DataError("empty surface", lineno);
    const std::u32string surface = utf8::decode(std::string_view(line).substr(0, tab));
    if (!dict.add(surface, *type) && warnings) {
      warnings->push_back("line " + std::to_string(lineno) + ": duplicate entry '" +
                          line.substr(0, tab) + "' (" + std::string(letter) + ") ignored");
    }
  }
  return dict;
}

Dictionary load_dictionary_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dictionary file " + path);
  return load_dictionary(in, warnings);
}

void write_dictionary(std::ostream& out, const Dictionary& dict) {
  for (const auto& [surface, type] : dict.entries()) {
    out << utf8::encode(surface) << '\t' << type_letter(type) << '\n';
  }
}

Dictionary subsample_dictionary(const Dictionary& dict, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw StructureError("dictionary fraction must lie in (0, 1]");
  }
  const auto& entries = dict.entries();
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const auto keep = static_cast<std::size_t>(std::llround(fraction * entries.size()));
  order.resize(keep);
  std::sort(order.begin(), order.end());
  Dictionary out;
  for (std::size_t i : order) out.add(entries[i].first, entries[i].second);
  return out;
}

std::size_t SegmentList::entity_count() const {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [](const Segment& s) { return s.type.has_value(); }));
}

namespace {

Segment make_segment(std::u32string_view text, std::size_t start, std::size_t len,
                     const Dictionary& dict) {
  Segment seg{std::u32string(text.substr(start, len)), std::nullopt, start};
  if (const auto* types = dict.find(seg.text)) seg.type = types->front();
  return seg;
}

}  // namespace

SegmentList forward_max_match(std::u32string_view text, const Dictionary& dict) {
  SegmentList out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t width = std::max<std::size_t>(1, std::min(dict.max_len(), text.size() - pos));
    while (width > 1 && !dict.find(text.substr(pos, width))) --width;
    out.segments.push_back(make_segment(text, pos, width, dict));
    pos += width;
  }
  return out;
}

SegmentList backward_max_match(std::u32string_view text, const Dictionary& dict) {
  SegmentList out;
  std::size_t end = text.size();
  while (end > 0) {
    std::size_t width = std::max<std::size_t>(1, std::min(dict.max_len(), end));
    while (width > 1 && !dict.find(text.substr(end - width, width))) --width;
    out.segments.push_back(make_segment(text, end - width, width, dict));
    end -= width;
  }
  std::reverse(out.segments.begin(), out.segments.end());
  return out;
}

SegmentList bdmm_segment(std::u32string_view text, const Dictionary& dict) {
  SegmentList fwd = forward_max_match(text, dict);
  SegmentList bwd = backward_max_match(text, dict);
  return fwd.size() < bwd.size() ? std::move(fwd) : std::move(bwd);
}

std::vector<EntityType> lookup_exact(std::u32string_view text, const Dictionary& dict) {
  if (const auto* types = dict.find(text)) return *types;
  return {};
}

}  // namespace dictner
