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

#include "dictner/synthetic.h"

#include <algorithm>
#include <set>

#include "dictner/error.h"
#include "dictner/tensor.h"

namespace dictner {

namespace {

// Lower-case ASCII letters mark entity slots (d, s, t, e, b); everything
// else is carrier text.
constexpr std::u32string_view kTemplates[] = {
    U"未见bs。", U"患者d，予t。", U"查e示bs，", U"bs明显。",
    U"行e检查。", U"诊断为d。",   U"b无s。",     U"双侧b对称，",
    U"e正常。",   U"d伴s。",       U"复查e后t，", U"予t后s缓解。",
};

constexpr std::u32string_view kEntityChars =
    U"甲乙丙丁戊己庚辛壬癸子丑寅卯辰巳午晨申酉戌亥金木水火土山川风云雷电"
    U"春夏秋冬东南西北红黄蓝白黑青紫绿天地日月星辰江河湖海";

struct Surface {
  std::u32string text;
  EntityType type;
};

std::u32string random_surface(Rng& rng, std::u32string_view pool, std::size_t min_len,
                              std::size_t max_len) {
  const std::size_t len = min_len + rng.below(max_len - min_len + 1);
  std::u32string s;
  for (std::size_t k = 0; k < len; ++k) s.push_back(pool[rng.below(pool.size())]);
  return s;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& config) {
  if (config.char_pool < 2 || config.char_pool > kEntityChars.size()) {
    throw StructureError("char_pool must lie in [2, " + std::to_string(kEntityChars.size()) + "]");
  }
  if (config.entities_per_type == 0) throw StructureError("entities_per_type must be >= 1");
  if (!(config.oov_rate >= 0.0 && config.oov_rate <= 1.0)) {
    throw StructureError("oov_rate must lie in [0, 1]");
  }
  if (config.oov_rate > 0.0 && config.unseen_per_type == 0) {
    throw StructureError("oov_rate > 0 needs unseen_per_type >= 1");
  }
  const std::size_t n_templates =
      config.templates == 0 ? std::size(kTemplates) : std::min(config.templates, std::size(kTemplates));

  Rng rng(config.seed);
  const std::u32string_view pool = kEntityChars.substr(0, config.char_pool);

  // seen[k] / unseen[k]: surfaces of type k.
  std::vector<std::vector<std::u32string>> seen(kNumEntityTypes), unseen(kNumEntityTypes);
  std::set<std::u32string> used;
  SyntheticData out;
  auto fill = [&](std::vector<std::vector<std::u32string>>& bucket, std::size_t per_type) {
    for (int k = 0; k < kNumEntityTypes; ++k) {
      const auto type = type_from_code(k);
      const std::size_t min_len = type == EntityType::kBody ? 1 : 2;
      std::size_t attempts = 0;
      while (bucket[k].size() < per_type) {
        if (++attempts > 100000) throw StructureError("character pool too small for the requested entities");
        std::u32string s = random_surface(rng, pool, min_len, min_len + 2);
        if (!used.insert(s).second) continue;
        bucket[k].push_back(s);
        out.dict.add(s, type);
      }
    }
  };
  fill(seen, config.entities_per_type);
  fill(unseen, config.unseen_per_type);

  auto make_sentence = [&](double oov_rate) {
    LabeledSentence s;
    std::vector<EntitySpan> spans;
    const std::size_t clauses = 1 + rng.below(3);
    for (std::size_t c = 0; c < clauses; ++c) {
      for (char32_t ch : kTemplates[rng.below(n_templates)]) {
        const auto type = (ch < 0x80) ? type_from_letter(std::string(1, static_cast<char>(ch)))
                                      : std::nullopt;
        if (!type) {
          s.chars.push_back(ch);
          continue;
        }
        const int k = static_cast<int>(*type);
        const bool oov = oov_rate > 0.0 && rng.uniform() < oov_rate;
        const auto& bucket = oov ? unseen[k] : seen[k];
        const std::u32string& surface = bucket[rng.below(bucket.size())];
        spans.push_back({s.chars.size(), s.chars.size() + surface.size() - 1, *type});
        s.chars += surface;
      }
    }
    s.tags = spans_to_tags(spans, s.chars.size());
    return s;
  };

  for (std::size_t i = 0; i < config.train_sentences; ++i) out.train.push_back(make_sentence(0.0));
  for (std::size_t i = 0; i < config.test_sentences; ++i) out.test.push_back(make_sentence(config.oov_rate));
  return out;
}

}  // namespace dictner
