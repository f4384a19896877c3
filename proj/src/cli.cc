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

#include "dictner/cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dictner/corpus.h"
#include "dictner/dictionary.h"
#include "dictner/error.h"
#include "dictner/eval.h"
#include "dictner/features.h"
#include "dictner/model.h"
#include "dictner/sweep.h"
#include "dictner/synthetic.h"
#include "dictner/utf8.h"

namespace dictner {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct ConfigFlags {
  std::string arch = "model1";
  std::string scheme = "pdet-embed";
  ModelConfig config;
  std::optional<double> clip;
  bool no_split = false;
  bool constrain = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--arch", arch, "baseline | model1 | model2")->capture_default_str();
    cmd->add_option("--scheme", scheme,
                    "ngram | piet-onehot | piet-embed | pdet-onehot | pdet-embed")
        ->capture_default_str();
    cmd->add_option("--epochs", config.epochs)->capture_default_str();
    cmd->add_option("--seed", config.seed)->capture_default_str();
    cmd->add_option("--d-e", config.d_e, "character embedding width")->capture_default_str();
    cmd->add_option("--d-d", config.d_d, "feature embedding width")->capture_default_str();
    cmd->add_option("--d-h", config.d_h, "hidden units (baseline, model1)")->capture_default_str();
    cmd->add_option("--d-hx", config.d_hx, "model2 character-stream hidden units")
        ->capture_default_str();
    cmd->add_option("--d-hd", config.d_hd, "model2 feature-stream hidden units")
        ->capture_default_str();
    cmd->add_option("--dropout", config.dropout)->capture_default_str();
    cmd->add_option("--batch", config.batch_size)->capture_default_str();
    cmd->add_option("--lr", config.lr)->capture_default_str();
    cmd->add_option("--clip", clip, "global gradient-norm bound (off by default)");
    cmd->add_option("--dev-split", config.dev_split, "fraction of clauses held out")
        ->capture_default_str();
    cmd->add_option("--patience", config.patience, "early-stopping patience (0 = off)")
        ->capture_default_str();
    cmd->add_flag("--no-split-clauses", no_split, "do not split sentences at clause punctuation");
    cmd->add_flag("--constrain", constrain, "forbid invalid BIEOS transitions when decoding");
  }

  ModelConfig resolve() const {
    ModelConfig c = config;
    const auto a = parse_arch(arch);
    if (!a) throw UsageError("unknown --arch '" + arch + "'");
    c.arch = *a;
    const auto s = parse_scheme(scheme);
    if (!s) throw UsageError("unknown --scheme '" + scheme + "'");
    c.scheme = c.arch == ArchKind::kBaseline ? std::nullopt : std::optional(*s);
    c.clip = clip;
    c.split_clauses = !no_split;
    c.constrain_decode = constrain;
    try {
      c.validate();
    } catch (const StructureError& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

Dictionary load_dict_or_empty(const std::string& path, std::ostream& err) {
  if (path.empty()) return {};
  std::vector<std::string> warnings;
  Dictionary d = load_dictionary_file(path, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return d;
}

std::vector<LabeledSentence> read_text_input(const std::string& path, bool column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file " + path);
  return column ? parse_corpus(in) : read_plain_text(in);
}

// Writes to `path`, or to `fallback` when path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DataError("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw UsageError(std::string("bad value '") + item + "' in " + flag);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  return out;
}

std::string segments_line(const SegmentList& segs) {
  std::string line;
  for (std::size_t k = 0; k < segs.segments.size(); ++k) {
    const auto& s = segs.segments[k];
    if (k) line += ' ';
    line += utf8::encode(s.text);
    line += '/';
    line += s.type ? std::string(1, type_letter(*s.type)) : "None";
  }
  return line;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dictionary-augmented character-level clinical NER"};
  app.name("dictner");
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a tagger");
  ConfigFlags train_flags;
  train_flags.attach(train_cmd);
  std::string corpus_path, dict_path, model_path, metrics_path, emb_path, feat_emb_path;
  train_cmd->add_option("--corpus", corpus_path, "tagged training corpus")->required();
  train_cmd->add_option("--dict", dict_path, "dictionary (required unless --arch baseline)");
  train_cmd->add_option("--out", model_path, "model file to write")->required();
  train_cmd->add_option("--metrics", metrics_path, "per-epoch metrics log (default: stdout)");
  train_cmd->add_option("--embeddings", emb_path, "pretrained character vectors");
  train_cmd->add_option("--feature-embeddings", feat_emb_path, "pretrained feature-label vectors");

  // tag
  auto* tag_cmd = app.add_subcommand("tag", "Tag raw text with a trained model");
  std::string input_path, out_path, summary_path;
  bool column_input = false;
  tag_cmd->add_option("--model", model_path)->required();
  tag_cmd->add_option("--input", input_path, "one sentence per line")->required();
  tag_cmd->add_option("--dict", dict_path);
  tag_cmd->add_option("--out", out_path, "tagged corpus (default: stdout)");
  tag_cmd->add_option("--summary", summary_path, "span summary (default: stderr)");
  tag_cmd->add_flag("--column", column_input, "input is in corpus column format");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score predicted tags against gold tags");
  std::string gold_path, pred_path;
  eval_cmd->add_option("--gold", gold_path)->required();
  eval_cmd->add_option("--pred", pred_path)->required();

  // segment
  auto* seg_cmd = app.add_subcommand("segment", "Dictionary maximum-matching segmentation");
  std::string direction = "bdmm";
  seg_cmd->add_option("--dict", dict_path)->required();
  seg_cmd->add_option("--input", input_path)->required();
  seg_cmd->add_option("--direction", direction, "bdmm | forward | backward")->capture_default_str();

  // features
  auto* feat_cmd = app.add_subcommand("features", "Dump per-character dictionary features");
  std::string feat_scheme = "pdet-embed";
  feat_cmd->add_option("--dict", dict_path)->required();
  feat_cmd->add_option("--input", input_path)->required();
  feat_cmd->add_option("--scheme", feat_scheme)->capture_default_str();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Retrain over dictionary fractions or hidden sizes");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  std::string test_path, sweep_dict, sweep_hidden_sizes;
  sweep_cmd->add_option("--corpus", corpus_path)->required();
  sweep_cmd->add_option("--test", test_path)->required();
  sweep_cmd->add_option("--dict", dict_path);
  auto* sd = sweep_cmd->add_option("--sweep-dict", sweep_dict, "e.g. 0.8,0.85,0.9,0.95");
  auto* sh = sweep_cmd->add_option("--sweep-hidden", sweep_hidden_sizes, "e.g. 128,192,256,320,384");
  sd->excludes(sh);

  // gen-synthetic (hidden)
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic corpus and dictionary");
  gen_cmd->group("");
  SyntheticConfig syn;
  std::string out_dir;
  gen_cmd->add_option("--out-dir", out_dir)->required();
  gen_cmd->add_option("--train", syn.train_sentences)->capture_default_str();
  gen_cmd->add_option("--test", syn.test_sentences)->capture_default_str();
  gen_cmd->add_option("--entities", syn.entities_per_type)->capture_default_str();
  gen_cmd->add_option("--unseen", syn.unseen_per_type)->capture_default_str();
  gen_cmd->add_option("--oov-rate", syn.oov_rate)->capture_default_str();
  gen_cmd->add_option("--char-pool", syn.char_pool)->capture_default_str();
  gen_cmd->add_option("--templates", syn.templates)->capture_default_str();
  gen_cmd->add_option("--seed", syn.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train_cmd) {
      const ModelConfig cfg = train_flags.resolve();
      if (cfg.uses_features() && dict_path.empty()) {
        throw UsageError("--dict is required for --arch " + train_flags.arch);
      }
      const auto corpus = parse_corpus_file(corpus_path);
      const Dictionary dict = load_dict_or_empty(dict_path, err);
      Trainer trainer(corpus, dict, cfg);
      if (!emb_path.empty()) {
        std::ifstream in(emb_path);
        if (!in) throw DataError("cannot open " + emb_path);
        const double cov = load_pretrained_embeddings(trainer.model(), in, EmbeddingTarget::kCharacters);
        err << "character embedding coverage: " << cov << '\n';
      }
      if (!feat_emb_path.empty()) {
        std::ifstream in(feat_emb_path);
        if (!in) throw DataError("cannot open " + feat_emb_path);
        const double cov = load_pretrained_embeddings(trainer.model(), in, EmbeddingTarget::kFeatures);
        err << "feature embedding coverage: " << cov << '\n';
      }
      Sink metrics(metrics_path, out);
      trainer.run(&*metrics);
      save_model_file(trainer.model(), model_path);
    } else if (*tag_cmd) {
      const TaggerModel model = load_model_file(model_path);
      if (model.config.uses_features() && dict_path.empty()) {
        throw UsageError("--dict is required for a " + std::string(arch_name(model.config.arch)) +
                         " model");
      }
      const Dictionary dict = load_dict_or_empty(dict_path, err);
      const auto input = read_text_input(input_path, column_input);
      Sink tagged(out_path, out);
      Sink summary(summary_path, err);
      bool warned = false;
      std::vector<LabeledSentence> result;
      for (std::size_t k = 0; k < input.size(); ++k) {
        const TagResult r = tag(model, input[k].chars, dict, warned ? nullptr : &err);
        warned = true;
        const LabeledSentence s{input[k].chars, spans_to_tags(r.spans, input[k].chars.size())};
        write_corpus(*tagged, std::span(&s, 1));
        *summary << "sentence " << k + 1 << ':';
        for (const auto& span : r.spans) {
          *summary << ' ' << span.start << '-' << span.end << ':' << type_letter(span.type) << ':'
                   << utf8::encode(std::u32string_view(input[k].chars).substr(span.start, span.length()));
        }
        *summary << '\n';
      }
    } else if (*eval_cmd) {
      const auto gold = parse_corpus_file(gold_path);
      const auto pred = parse_corpus_file(pred_path);
      if (gold.size() != pred.size()) {
        throw DataError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                        std::to_string(pred.size()));
      }
      std::vector<std::vector<EntitySpan>> g, p;
      for (std::size_t k = 0; k < gold.size(); ++k) {
        if (!gold[k].tags || !pred[k].tags) throw DataError("eval needs tagged files");
        if (gold[k].chars != pred[k].chars) {
          throw DataError("sentence " + std::to_string(k + 1) + " differs between gold and prediction");
        }
        g.push_back(tags_to_spans(*gold[k].tags));
        p.push_back(tags_to_spans(*pred[k].tags));
      }
      out << format_report(micro_prf(g, p));
    } else if (*seg_cmd) {
      const Dictionary dict = load_dict_or_empty(dict_path, err);
      for (const auto& s : read_text_input(input_path, false)) {
        SegmentList segs;
        if (direction == "bdmm") {
          segs = bdmm_segment(s.chars, dict);
        } else if (direction == "forward") {
          segs = forward_max_match(s.chars, dict);
        } else if (direction == "backward") {
          segs = backward_max_match(s.chars, dict);
        } else {
          throw UsageError("unknown --direction '" + direction + "'");
        }
        out << segments_line(segs) << '\n';
      }
    } else if (*feat_cmd) {
      const auto scheme = parse_scheme(feat_scheme);
      if (!scheme) throw UsageError("unknown --scheme '" + feat_scheme + "'");
      const Dictionary dict = load_dict_or_empty(dict_path, err);
      const std::string name(scheme_name(*scheme));
      for (const auto& s : read_text_input(input_path, false)) {
        const SentenceFeatures f = extract_features(s.chars, dict, *scheme);
        for (std::size_t t = 0; t < s.chars.size(); ++t) {
          out << utf8::encode(s.chars[t]) << '\t' << name << '\t';
          if (is_embedding_scheme(*scheme)) {
            out << label_name(*scheme, f.indices[t]);
          } else {
            const auto row = f.dense.row(t);
            for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
          }
          out << '\n';
        }
        out << '\n';
      }
    } else if (*sweep_cmd) {
      const ModelConfig cfg = sweep_flags.resolve();
      if (sweep_dict.empty() && sweep_hidden_sizes.empty()) {
        throw UsageError("sweep needs --sweep-dict or --sweep-hidden");
      }
      if (!sweep_dict.empty() && !cfg.uses_features()) {
        throw UsageError("--sweep-dict needs --arch model1 or model2");
      }
      if (cfg.uses_features() && dict_path.empty()) throw UsageError("--dict is required");
      const auto corpus = parse_corpus_file(corpus_path);
      const auto test = parse_corpus_file(test_path);
      const Dictionary dict = load_dict_or_empty(dict_path, err);
      if (!sweep_dict.empty()) {
        const auto fractions = parse_list<double>(sweep_dict, "--sweep-dict");
        for (double f : fractions) {
          if (!(f > 0.0 && f <= 1.0)) throw UsageError("--sweep-dict fractions must lie in (0, 1]");
        }
        out << format_sweep("fraction", sweep_dictionary(corpus, test, dict, cfg, fractions, cfg.seed));
      } else {
        const auto sizes = parse_list<std::size_t>(sweep_hidden_sizes, "--sweep-hidden");
        out << format_sweep("hidden", sweep_hidden(corpus, test, dict, cfg, sizes));
      }
    } else if (*gen_cmd) {
      const SyntheticData data = generate_synthetic(syn);
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) throw DataError("cannot create " + out_dir + ": " + ec.message());
      auto write = [&](const std::string& name, auto&& fn) {
        const std::string path = out_dir + "/" + name;
        std::ofstream f(path);
        if (!f) throw DataError("cannot write " + path);
        fn(f);
      };
      write("train.tsv", [&](std::ostream& f) { write_corpus(f, data.train); });
      write("test.tsv", [&](std::ostream& f) { write_corpus(f, data.test); });
      write("dict.tsv", [&](std::ostream& f) { write_dictionary(f, data.dict); });
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace dictner
