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

#include "dictner/features.h"

#include "dictner/error.h"

namespace dictner {

namespace {

struct SchemeInfo {
  FeatureScheme scheme;
  std::string_view name;
};

constexpr SchemeInfo kSchemes[] = {
    {FeatureScheme::kNGram, "ngram"},
    {FeatureScheme::kPietOneHot, "piet-onehot"},
    {FeatureScheme::kPietEmbed, "piet-embed"},
    {FeatureScheme::kPdetOneHot, "pdet-onehot"},
    {FeatureScheme::kPdetEmbed, "pdet-embed"},
};

bool is_piet(FeatureScheme s) {
  return s == FeatureScheme::kPietOneHot || s == FeatureScheme::kPietEmbed;
}
bool is_pdet(FeatureScheme s) {
  return s == FeatureScheme::kPdetOneHot || s == FeatureScheme::kPdetEmbed;
}

SentenceFeatures encode_labels(const std::vector<int>& codes, std::size_t inventory,
                               FeatureScheme scheme) {
  SentenceFeatures out;
  out.scheme = scheme;
  if (is_embedding_scheme(scheme)) {
    out.indices = codes;
  } else {
    out.dense = Matrix(codes.size(), inventory);
    for (std::size_t t = 0; t < codes.size(); ++t) out.dense(t, codes[t]) = 1.0;
  }
  return out;
}

}  // namespace

std::string_view scheme_name(FeatureScheme scheme) {
  for (const auto& s : kSchemes)
    if (s.scheme == scheme) return s.name;
  return "?";
}

std::optional<FeatureScheme> parse_scheme(std::string_view name) {
  for (const auto& s : kSchemes)
    if (s.name == name) return s.scheme;
  return std::nullopt;
}

bool is_embedding_scheme(FeatureScheme scheme) {
  return scheme == FeatureScheme::kPietEmbed || scheme == FeatureScheme::kPdetEmbed;
}

std::size_t feature_width(FeatureScheme scheme, std::size_t embed_dim) {
  switch (scheme) {
    case FeatureScheme::kNGram: return kNgramWidth;
    case FeatureScheme::kPietOneHot: return PietLabel::kCount;
    case FeatureScheme::kPdetOneHot: return PdetLabel::kCount;
    case FeatureScheme::kPietEmbed:
    case FeatureScheme::kPdetEmbed: return embed_dim;
  }
  return 0;
}

std::size_t label_inventory(FeatureScheme scheme) {
  if (is_piet(scheme)) return PietLabel::kCount;
  if (is_pdet(scheme)) return PdetLabel::kCount;
  return 0;
}

PietLabel PietLabel::from_code(int code) {
  if (code < 0 || code >= kCount) throw StructureError("PIET code out of range");
  return code == 0 ? PietLabel() : PietLabel(type_from_code(code - 1));
}

std::string PietLabel::str() const {
  return is_none() ? "None" : std::string(1, type_letter(type_from_code(code_ - 1)));
}

PdetLabel PdetLabel::from_code(int code) {
  PdetLabel l;
  l.tag_ = Tag::from_code(code);
  return l;
}

PietLabel PdetLabel::strip_position() const {
  return is_none() ? PietLabel() : PietLabel(tag_.type());
}

std::string PdetLabel::str() const { return is_none() ? "None" : tag_.str(); }

std::vector<NgramFeature> ngram_features(std::u32string_view chars, const Dictionary& dict) {
  const std::size_t n = chars.size();
  std::vector<NgramFeature> out(n, NgramFeature{});
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < kNgramTemplates; ++j) {
      const std::size_t len = 2 + j / 2;
      if (len > dict.max_len()) continue;
      const bool ends_at_i = j % 2 == 0;
      std::size_t begin;
      if (ends_at_i) {
        if (i + 1 < len) continue;
        begin = i + 1 - len;
      } else {
        if (i + len > n) continue;
        begin = i;
      }
      if (const auto* types = dict.find(chars.substr(begin, len))) {
        for (EntityType t : *types) out[i][j * kNumEntityTypes + static_cast<int>(t)] = 1;
      }
    }
  }
  return out;
}

std::vector<PietLabel> piet_labels(std::u32string_view chars, const Dictionary& dict) {
  std::vector<PietLabel> out;
  out.reserve(chars.size());
  for (const auto& seg : bdmm_segment(chars, dict).segments) {
    const PietLabel label = seg.type ? PietLabel(*seg.type) : PietLabel();
    out.insert(out.end(), seg.text.size(), label);
  }
  return out;
}

std::vector<PdetLabel> pdet_labels(std::u32string_view chars, const Dictionary& dict) {
  std::vector<PdetLabel> out;
  out.reserve(chars.size());
  for (const auto& seg : bdmm_segment(chars, dict).segments) {
    const std::size_t len = seg.text.size();
    if (!seg.type) {
      out.insert(out.end(), len, PdetLabel());
    } else if (len == 1) {
      out.emplace_back(Position::kSingle, *seg.type);
    } else {
      out.emplace_back(Position::kBegin, *seg.type);
      for (std::size_t k = 1; k + 1 < len; ++k) out.emplace_back(Position::kInside, *seg.type);
      out.emplace_back(Position::kEnd, *seg.type);
    }
  }
  return out;
}

SentenceFeatures encode(std::span<const NgramFeature> bits, FeatureScheme scheme) {
  if (scheme != FeatureScheme::kNGram) {
    throw StructureError("n-gram bits cannot be encoded as " + std::string(scheme_name(scheme)));
  }
  SentenceFeatures out;
  out.scheme = scheme;
  out.dense = Matrix(bits.size(), kNgramWidth);
  for (std::size_t t = 0; t < bits.size(); ++t)
    for (int k = 0; k < kNgramWidth; ++k) out.dense(t, k) = bits[t][k];
  return out;
}

SentenceFeatures encode(std::span<const PietLabel> labels, FeatureScheme scheme) {
  if (!is_piet(scheme)) {
    throw StructureError("PIET labels cannot be encoded as " + std::string(scheme_name(scheme)));
  }
  std::vector<int> codes;
  codes.reserve(labels.size());
  for (auto l : labels) codes.push_back(l.code());
  return encode_labels(codes, PietLabel::kCount, scheme);
}

SentenceFeatures encode(std::span<const PdetLabel> labels, FeatureScheme scheme) {
  if (!is_pdet(scheme)) {
    throw StructureError("PDET labels cannot be encoded as " + std::string(scheme_name(scheme)));
  }
  std::vector<int> codes;
  codes.reserve(labels.size());
  for (auto l : labels) codes.push_back(l.code());
  return encode_labels(codes, PdetLabel::kCount, scheme);
}

SentenceFeatures extract_features(std::u32string_view chars, const Dictionary& dict,
                                  FeatureScheme scheme) {
  if (scheme == FeatureScheme::kNGram) return encode(ngram_features(chars, dict), scheme);
  if (is_piet(scheme)) return encode(piet_labels(chars, dict), scheme);
  return encode(pdet_labels(chars, dict), scheme);
}

std::string label_name(FeatureScheme scheme, int index) {
  if (is_piet(scheme)) return PietLabel::from_code(index).str();
  if (is_pdet(scheme)) return PdetLabel::from_code(index).str();
  throw StructureError("scheme " + std::string(scheme_name(scheme)) + " has no label names");
}

}  // namespace dictner
