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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dictner/cli.h"
#include "dictner/corpus.h"
#include "dictner/dictionary.h"
#include "dictner/error.h"
#include "dictner/eval.h"
#include "dictner/features.h"
#include "dictner/model.h"
#include "dictner/synthetic.h"

namespace py = pybind11;
using namespace dictner;

namespace {

// Python-side sentence: (text, tags or None).
using PySentence = std::tuple<std::u32string, std::optional<std::vector<std::string>>>;
using PySpan = std::tuple<std::size_t, std::size_t, std::string>;

EntityType letter_type(const std::string& letter) {
  const auto t = type_from_letter(letter);
  if (!t) throw py::value_error("unknown entity type '" + letter + "'");
  return *t;
}

PySentence to_py(const LabeledSentence& s) {
  if (!s.tags) return {s.chars, std::nullopt};
  std::vector<std::string> tags;
  for (Tag t : *s.tags) tags.push_back(t.str());
  return {s.chars, tags};
}

LabeledSentence from_py(const PySentence& s) {
  LabeledSentence out{std::get<0>(s), std::nullopt};
  if (const auto& tags = std::get<1>(s)) {
    if (tags->size() != out.chars.size()) throw py::value_error("tag count differs from character count");
    out.tags.emplace();
    for (const auto& name : *tags) {
      const auto t = Tag::parse(name);
      if (!t) throw py::value_error("unknown tag '" + name + "'");
      out.tags->push_back(*t);
    }
  }
  return out;
}

std::vector<LabeledSentence> from_py(const std::vector<PySentence>& corpus) {
  std::vector<LabeledSentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(from_py(s));
  return out;
}

std::vector<PySentence> to_py(const std::vector<LabeledSentence>& corpus) {
  std::vector<PySentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(to_py(s));
  return out;
}

std::vector<PySpan> to_py(const std::vector<EntitySpan>& spans) {
  std::vector<PySpan> out;
  for (const auto& sp : spans) out.emplace_back(sp.start, sp.end, std::string(1, type_letter(sp.type)));
  return out;
}

std::vector<EntitySpan> spans_from_py(const std::vector<PySpan>& spans) {
  std::vector<EntitySpan> out;
  for (const auto& [start, end, letter] : spans) out.push_back({start, end, letter_type(letter)});
  return out;
}

py::dict counts_dict(const PrfCounts& c) {
  py::dict d;
  d["tp"] = c.true_positive;
  d["predicted"] = c.predicted;
  d["gold"] = c.gold;
  d["precision"] = c.precision();
  d["recall"] = c.recall();
  d["f1"] = c.f1();
  return d;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  for (int k = 0; k < kNumEntityTypes; ++k) d[py::str(std::string(1, type_letter(type_from_code(k))))] = counts_dict(r.per_type[k]);
  d["overall"] = counts_dict(r.overall);
  return d;
}

std::vector<std::tuple<std::u32string, std::optional<std::string>>> segment(const std::u32string& text,
                                                                            const Dictionary& dict,
                                                                            const std::string& direction) {
  SegmentList segs;
  if (direction == "bdmm") {
    segs = bdmm_segment(text, dict);
  } else if (direction == "forward") {
    segs = forward_max_match(text, dict);
  } else if (direction == "backward") {
    segs = backward_max_match(text, dict);
  } else {
    throw py::value_error("direction must be bdmm, forward or backward");
  }
  std::vector<std::tuple<std::u32string, std::optional<std::string>>> out;
  for (const auto& s : segs.segments) {
    std::optional<std::string> t;
    if (s.type) t = std::string(1, type_letter(*s.type));
    out.emplace_back(s.text, t);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dictionary-feature Bi-LSTM-CRF tagger for clinical named entities";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<StructureError>(m, "StructureError", PyExc_ValueError);

  py::class_<Dictionary>(m, "Dictionary")
      .def(py::init<>())
      .def(py::init([](const std::vector<std::tuple<std::u32string, std::string>>& entries) {
             Dictionary d;
             for (const auto& [surface, letter] : entries) d.add(surface, letter_type(letter));
             return d;
           }),
           py::arg("entries"))
      .def_static("load", [](const std::string& path) { return load_dictionary_file(path); }, py::arg("path"))
      .def("add", [](Dictionary& d, const std::u32string& s, const std::string& letter) { return d.add(s, letter_type(letter)); })
      .def("lookup",
           [](const Dictionary& d, const std::u32string& s) {
             std::vector<std::string> out;
             for (auto t : lookup_exact(s, d)) out.emplace_back(1, type_letter(t));
             return out;
           })
      .def("entries",
           [](const Dictionary& d) {
             std::vector<std::tuple<std::u32string, std::string>> out;
             for (const auto& [s, t] : d.entries()) out.emplace_back(s, std::string(1, type_letter(t)));
             return out;
           })
      .def("subsample", &subsample_dictionary, py::arg("fraction"), py::arg("seed"))
      .def_property_readonly("max_len", &Dictionary::max_len)
      .def_property_readonly("fingerprint", &Dictionary::fingerprint)
      .def("__len__", &Dictionary::entry_count);

  m.def("read_corpus", [](const std::string& path) { return to_py(parse_corpus_file(path)); }, py::arg("path"),
        "Sentences of a column-format file as (text, tags or None) tuples.");
  m.def("parse_corpus",
        [](const std::string& text) {
          std::istringstream in(text);
          return to_py(parse_corpus(in));
        },
        py::arg("text"));
  m.def("format_corpus",
        [](const std::vector<PySentence>& corpus) {
          std::ostringstream out;
          write_corpus(out, from_py(corpus));
          return out.str();
        },
        py::arg("corpus"));
  m.def("split_clauses", [](const PySentence& s) { return to_py(split_clauses(from_py(s))); }, py::arg("sentence"));
  m.def("tags_to_spans",
        [](const std::vector<std::string>& names) {
          std::vector<Tag> tags;
          for (const auto& name : names) {
            const auto t = Tag::parse(name);
            if (!t) throw py::value_error("unknown tag '" + name + "'");
            tags.push_back(*t);
          }
          return to_py(tags_to_spans(tags));
        },
        py::arg("tags"));

  m.def("segment", &segment, py::arg("text"), py::arg("dict"), py::arg("direction") = "bdmm");
  m.def("piet_labels",
        [](const std::u32string& text, const Dictionary& d) {
          std::vector<std::string> out;
          for (const auto& l : piet_labels(text, d)) out.push_back(l.str());
          return out;
        },
        py::arg("text"), py::arg("dict"));
  m.def("pdet_labels",
        [](const std::u32string& text, const Dictionary& d) {
          std::vector<std::string> out;
          for (const auto& l : pdet_labels(text, d)) out.push_back(l.str());
          return out;
        },
        py::arg("text"), py::arg("dict"));
  m.def("ngram_features",
        [](const std::u32string& text, const Dictionary& d) {
          std::vector<std::vector<int>> out;
          for (const auto& f : ngram_features(text, d)) out.emplace_back(f.begin(), f.end());
          return out;
        },
        py::arg("text"), py::arg("dict"));

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_property(
          "arch", [](const ModelConfig& c) { return std::string(arch_name(c.arch)); },
          [](ModelConfig& c, const std::string& name) {
            const auto a = parse_arch(name);
            if (!a) throw py::value_error("unknown arch '" + name + "'");
            c.arch = *a;
          })
      .def_property(
          "scheme",
          [](const ModelConfig& c) -> std::optional<std::string> {
            if (!c.scheme) return std::nullopt;
            return std::string(scheme_name(*c.scheme));
          },
          [](ModelConfig& c, const std::optional<std::string>& name) {
            if (!name) {
              c.scheme.reset();
              return;
            }
            const auto s = parse_scheme(*name);
            if (!s) throw py::value_error("unknown scheme '" + *name + "'");
            c.scheme = *s;
          })
      .def_readwrite("d_e", &ModelConfig::d_e)
      .def_readwrite("d_d", &ModelConfig::d_d)
      .def_readwrite("d_h", &ModelConfig::d_h)
      .def_readwrite("d_hx", &ModelConfig::d_hx)
      .def_readwrite("d_hd", &ModelConfig::d_hd)
      .def_readwrite("dropout", &ModelConfig::dropout)
      .def_readwrite("batch_size", &ModelConfig::batch_size)
      .def_readwrite("epochs", &ModelConfig::epochs)
      .def_readwrite("seed", &ModelConfig::seed)
      .def_readwrite("lr", &ModelConfig::lr)
      .def_readwrite("clip", &ModelConfig::clip)
      .def_readwrite("dev_split", &ModelConfig::dev_split)
      .def_readwrite("patience", &ModelConfig::patience)
      .def_readwrite("split_clauses", &ModelConfig::split_clauses)
      .def_readwrite("constrain_decode", &ModelConfig::constrain_decode);

  py::class_<TaggerModel>(m, "Model")
      .def_static(
          "train",
          [](const std::vector<PySentence>& corpus, const Dictionary& dict, const ModelConfig& config) {
            const auto sentences = from_py(corpus);
            std::vector<double> losses;
            TrainResult r = [&] {
              py::gil_scoped_release release;
              return train(sentences, dict, config);
            }();
            for (const auto& rec : r.log) losses.push_back(rec.loss);
            return std::make_tuple(std::move(r.model), losses);
          },
          py::arg("corpus"), py::arg("dict"), py::arg("config"),
          "Returns (model, per-epoch training losses).")
      .def_static("load", [](const std::string& path) { return load_model_file(path); }, py::arg("path"))
      .def("save", [](const TaggerModel& m, const std::string& path) { save_model_file(m, path); }, py::arg("path"))
      .def(
          "tag",
          [](const TaggerModel& m, const std::u32string& text, const Dictionary& dict) {
            const TagResult r = tag(m, text, dict);
            std::vector<std::string> tags;
            for (Tag t : r.tags) tags.push_back(t.str());
            return std::make_tuple(tags, to_py(r.spans));
          },
          py::arg("text"), py::arg("dict") = Dictionary{}, "Returns (tags, spans); spans are (start, end, type).")
      .def(
          "evaluate",
          [](const TaggerModel& m, const std::vector<PySentence>& corpus, const Dictionary& dict) {
            return report_dict(evaluate(m, from_py(corpus), dict));
          },
          py::arg("corpus"), py::arg("dict") = Dictionary{})
      .def(
          "load_embeddings",
          [](TaggerModel& m, const std::string& text, bool features) {
            std::istringstream in(text);
            return load_pretrained_embeddings(m, in, features ? EmbeddingTarget::kFeatures : EmbeddingTarget::kCharacters);
          },
          py::arg("text"), py::arg("features") = false)
      .def_property_readonly("config", [](const TaggerModel& m) { return m.config; })
      .def_property_readonly("vocab_size", [](const TaggerModel& m) { return m.vocab.size(); })
      .def_property_readonly("crf_input_dim", &TaggerModel::crf_input_dim);

  m.def("micro_prf",
        [](const std::vector<std::vector<PySpan>>& gold, const std::vector<std::vector<PySpan>>& pred) {
          std::vector<std::vector<EntitySpan>> g, p;
          for (const auto& s : gold) g.push_back(spans_from_py(s));
          for (const auto& s : pred) p.push_back(spans_from_py(s));
          return report_dict(micro_prf(g, p));
        },
        py::arg("gold"), py::arg("pred"));

  m.def(
      "generate_synthetic",
      [](std::size_t train, std::size_t test, std::size_t entities, std::size_t unseen, double oov_rate,
         std::size_t char_pool, std::size_t templates, std::uint64_t seed) {
        SyntheticConfig c{train, test, entities, unseen, oov_rate, char_pool, templates, seed};
        SyntheticData d = generate_synthetic(c);
        return std::make_tuple(to_py(d.train), to_py(d.test), std::move(d.dict));
      },
      py::arg("train") = 50, py::arg("test") = 0, py::arg("entities") = 6, py::arg("unseen") = 0,
      py::arg("oov_rate") = 0.0, py::arg("char_pool") = 12, py::arg("templates") = 0, py::arg("seed") = 1,
      "Returns (train, test, dictionary).");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "dictner");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit code, stdout, stderr).");

  m.attr("__version__") = "0.1.0";
}
