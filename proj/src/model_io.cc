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

// Model files are line-oriented text: a versioned header of key/value
// pairs, the vocabulary as code points, then every tensor as
// `param <name> <rows> <cols>` followed by one line per row. Numbers use
// 17 significant digits so values survive the round trip bit for bit.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "dictner/error.h"
#include "dictner/model.h"
#include "dictner/utf8.h"

namespace dictner {

namespace {

constexpr std::string_view kMagic = "dictner-model";
constexpr int kVersion = 1;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) throw DataError("unexpected end of model file", lineno_ + 1);
    ++lineno_;
    return line;
  }

  // Reads `key value` and returns value.
  std::string field(std::string_view key) {
    const std::string line = next();
    const auto sp = line.find(' ');
    if (sp == std::string::npos || std::string_view(line).substr(0, sp) != key) {
      fail("expected field '" + std::string(key) + "'");
    }
    return line.substr(sp + 1);
  }

  [[noreturn]] void fail(const std::string& what) const { throw DataError(what, lineno_); }
  std::size_t line() const { return lineno_; }

 private:
  std::istream& in_;
  std::size_t lineno_ = 0;
};

std::size_t to_size(const LineReader& r, const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') r.fail("bad integer '" + s + "'");
  return static_cast<std::size_t>(v);
}

double to_double(const LineReader& r, const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') r.fail("bad number '" + s + "'");
  return v;
}

bool to_bool(const LineReader& r, const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  r.fail("bad flag '" + s + "'");
}

}  // namespace

void save_model(const TaggerModel& model, std::ostream& out) {
  const auto& c = model.config;
  out << kMagic << ' ' << kVersion << '\n';
  out << "arch " << arch_name(c.arch) << '\n';
  out << "scheme " << (c.scheme ? scheme_name(*c.scheme) : "none") << '\n';
  out << "d_e " << c.d_e << '\n';
  out << "d_d " << c.d_d << '\n';
  out << "d_h " << c.d_h << '\n';
  out << "d_hx " << c.d_hx << '\n';
  out << "d_hd " << c.d_hd << '\n';
  out << "dropout " << fmt_double(c.dropout) << '\n';
  out << "batch_size " << c.batch_size << '\n';
  out << "epochs " << c.epochs << '\n';
  out << "seed " << c.seed << '\n';
  out << "lr " << fmt_double(c.lr) << '\n';
  out << "clip " << (c.clip ? fmt_double(*c.clip) : "none") << '\n';
  out << "dev_split " << fmt_double(c.dev_split) << '\n';
  out << "patience " << c.patience << '\n';
  out << "split_clauses " << (c.split_clauses ? 1 : 0) << '\n';
  out << "constrain_decode " << (c.constrain_decode ? 1 : 0) << '\n';
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016" PRIx64, model.dict_fingerprint);
  out << "dict_fingerprint " << fp << '\n';

  out << "vocab " << model.vocab.chars().size() << '\n';
  bool first = true;
  for (char32_t ch : model.vocab.chars()) {
    out << (first ? "" : " ") << static_cast<std::uint32_t>(ch);
    first = false;
  }
  out << '\n';

  const auto params = model.params();
  out << "params " << params.size() << '\n';
  for (const Param* p : params) {
    out << "param " << p->name << ' ' << p->value.rows() << ' ' << p->value.cols() << '\n';
    for (std::size_t r = 0; r < p->value.rows(); ++r) {
      const auto row = p->value.row(r);
      for (std::size_t k = 0; k < row.size(); ++k) out << (k ? " " : "") << fmt_double(row[k]);
      out << '\n';
    }
  }
  out << "end\n";
}

void save_model_file(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  save_model(model, out);
  if (!out) throw DataError("error writing model file " + path);
}

TaggerModel load_model(std::istream& in) {
  LineReader r(in);
  {
    std::istringstream head(r.next());
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != kMagic) r.fail("not a dictner model file");
    if (version != kVersion) {
      r.fail("unsupported model version " + std::to_string(version) + " (expected " +
             std::to_string(kVersion) + ")");
    }
  }
  ModelConfig c;
  const auto arch = parse_arch(r.field("arch"));
  if (!arch) r.fail("unknown architecture");
  c.arch = *arch;
  const std::string scheme = r.field("scheme");
  if (scheme == "none") {
    c.scheme.reset();
  } else {
    c.scheme = parse_scheme(scheme);
    if (!c.scheme) r.fail("unknown feature scheme '" + scheme + "'");
  }
  c.d_e = to_size(r, r.field("d_e"));
  c.d_d = to_size(r, r.field("d_d"));
  c.d_h = to_size(r, r.field("d_h"));
  c.d_hx = to_size(r, r.field("d_hx"));
  c.d_hd = to_size(r, r.field("d_hd"));
  c.dropout = to_double(r, r.field("dropout"));
  c.batch_size = to_size(r, r.field("batch_size"));
  c.epochs = to_size(r, r.field("epochs"));
  c.seed = to_size(r, r.field("seed"));
  c.lr = to_double(r, r.field("lr"));
  const std::string clip = r.field("clip");
  if (clip != "none") c.clip = to_double(r, clip);
  c.dev_split = to_double(r, r.field("dev_split"));
  c.patience = to_size(r, r.field("patience"));
  c.split_clauses = to_bool(r, r.field("split_clauses"));
  c.constrain_decode = to_bool(r, r.field("constrain_decode"));
  const std::string fp = r.field("dict_fingerprint");
  char* end = nullptr;
  const std::uint64_t fingerprint = std::strtoull(fp.c_str(), &end, 16);
  if (fp.size() != 16 || *end != '\0') r.fail("bad dictionary fingerprint");

  const std::size_t n_vocab = to_size(r, r.field("vocab"));
  Vocabulary vocab;
  {
    std::istringstream line(r.next());
    std::uint32_t cp = 0;
    for (std::size_t k = 0; k < n_vocab; ++k) {
      if (!(line >> cp)) r.fail("vocabulary shorter than declared");
      vocab.add(static_cast<char32_t>(cp));
    }
    if (vocab.chars().size() != n_vocab) r.fail("duplicate vocabulary entry");
  }

  TaggerModel model;
  try {
    model = build_model(c, std::move(vocab));
  } catch (const StructureError& e) {
    r.fail(e.what());
  }
  model.dict_fingerprint = fingerprint;

  auto params = model.params();
  if (to_size(r, r.field("params")) != params.size()) {
    r.fail("parameter count does not match the declared architecture");
  }
  for (Param* p : params) {
    std::istringstream head(r.next());
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    head >> tag >> name >> rows >> cols;
    if (tag != "param" || name != p->name) r.fail("expected tensor " + p->name);
    if (rows != p->value.rows() || cols != p->value.cols()) {
      r.fail("tensor " + name + " is " + std::to_string(rows) + "x" + std::to_string(cols) +
             " but the header implies " + std::to_string(p->value.rows()) + "x" +
             std::to_string(p->value.cols()));
    }
    for (std::size_t i = 0; i < rows; ++i) {
      const std::string line = r.next();
      const char* s = line.c_str();
      for (std::size_t k = 0; k < cols; ++k) {
        char* e = nullptr;
        const double v = std::strtod(s, &e);
        if (e == s) r.fail("tensor " + name + ": row too short");
        p->value(i, k) = v;
        s = e;
      }
      while (*s == ' ') ++s;
      if (*s != '\0') r.fail("tensor " + name + ": row too long");
    }
  }
  if (r.next() != "end") r.fail("missing end marker");
  return model;
}

TaggerModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  return load_model(in);
}

double load_pretrained_embeddings(TaggerModel& model, std::istream& in, EmbeddingTarget target) {
  EmbeddingTable* table = nullptr;
  std::unordered_map<std::string, std::size_t> rows;
  if (target == EmbeddingTarget::kCharacters) {
    table = &model.char_embed;
    const auto& chars = model.vocab.chars();
    for (std::size_t k = 0; k < chars.size(); ++k) rows.emplace(utf8::encode(chars[k]), k + 2);
  } else {
    if (!model.feature_embed) throw StructureError("model has no feature embedding table");
    table = &*model.feature_embed;
    for (std::size_t k = 0; k < table->rows(); ++k) {
      rows.emplace(label_name(*model.config.scheme, static_cast<int>(k)), k);
    }
  }

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }
  if (line.empty()) return 0.0;
  std::size_t dim = 0;
  {
    std::istringstream head(line);
    std::size_t count = 0;
    if (!(head >> count >> dim)) throw DataError("expected '<count> <dim>' header", lineno);
  }
  if (dim != table->dim()) {
    throw DataError("embedding dimension " + std::to_string(dim) + " does not match table width " +
                        std::to_string(table->dim()),
                    lineno);
  }
  std::vector<bool> covered(table->rows(), false);
  std::vector<double> values(dim);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) throw DataError("malformed embedding line", lineno);
    const std::string token = line.substr(0, sp);
    const char* s = line.c_str() + sp;
    for (std::size_t k = 0; k < dim; ++k) {
      char* e = nullptr;
      values[k] = std::strtod(s, &e);
      if (e == s) throw DataError("expected " + std::to_string(dim) + " values", lineno);
      s = e;
    }
    while (*s == ' ') ++s;
    if (*s != '\0') throw DataError("expected " + std::to_string(dim) + " values", lineno);
    auto it = rows.find(token);
    if (it == rows.end()) continue;
    auto row = table->table.value.row(it->second);
    std::copy(values.begin(), values.end(), row.begin());
    covered[it->second] = true;
  }
  std::size_t hit = 0;
  for (const auto& [token, row] : rows) hit += covered[row] ? 1 : 0;
  return rows.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(rows.size());
}

}  // namespace dictner
