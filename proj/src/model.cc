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

#include "dictner/model.h"

#include <cmath>
#include <ostream>

#include "dictner/crf.h"
#include "dictner/error.h"
#include "json.hpp"

namespace dictner {

namespace {

constexpr std::uint64_t kInitStream = 0x1;
constexpr std::uint64_t kShuffleStream = 0x2;
constexpr std::uint64_t kDropoutStream = 0x3;
constexpr std::uint64_t kDevStream = 0x4;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (stream * 0xd1b54a32d192ed03ULL));
  return r.next();
}

// [a | b] row-wise.
Matrix hconcat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t t = 0; t < a.rows(); ++t) {
    auto o = out.row(t);
    std::copy(a.row(t).begin(), a.row(t).end(), o.begin());
    std::copy(b.row(t).begin(), b.row(t).end(), o.begin() + a.cols());
  }
  return out;
}

// Splits columns [0, left) and [left, cols).
std::pair<Matrix, Matrix> hsplit(const Matrix& m, std::size_t left) {
  Matrix a(m.rows(), left), b(m.rows(), m.cols() - left);
  for (std::size_t t = 0; t < m.rows(); ++t) {
    const auto r = m.row(t);
    std::copy(r.begin(), r.begin() + left, a.row(t).begin());
    std::copy(r.begin() + left, r.end(), b.row(t).begin());
  }
  return {std::move(a), std::move(b)};
}

Matrix char_inputs(const TaggerModel& model, const Example& ex) {
  Matrix out(ex.char_ids.size(), model.config.d_e);
  for (std::size_t t = 0; t < ex.char_ids.size(); ++t) {
    const auto row = model.char_embed.lookup(ex.char_ids[t]);
    std::copy(row.begin(), row.end(), out.row(t).begin());
  }
  return out;
}

Matrix feature_inputs(const TaggerModel& model, const Example& ex) {
  const std::size_t T = ex.char_ids.size();
  const auto& f = ex.features;
  if (f.scheme != *model.config.scheme || f.length() != T) {
    throw StructureError("features do not match the model's scheme or sentence length");
  }
  if (!is_embedding_scheme(f.scheme)) {
    check_shape(f.dense, T, model.feature_dim(), "dense features");
    return f.dense;
  }
  Matrix out(T, model.feature_dim());
  for (std::size_t t = 0; t < T; ++t) {
    const auto row = model.feature_embed->lookup(f.indices[t]);
    std::copy(row.begin(), row.end(), out.row(t).begin());
  }
  return out;
}

void scatter_char_grads(TaggerModel& model, const Example& ex, const Matrix& d) {
  for (std::size_t t = 0; t < ex.char_ids.size(); ++t) model.char_embed.accumulate_grad(ex.char_ids[t], d.row(t));
}

void scatter_feature_grads(TaggerModel& model, const Example& ex, const Matrix& d) {
  if (!model.feature_embed) return;
  for (std::size_t t = 0; t < ex.features.indices.size(); ++t) {
    model.feature_embed->accumulate_grad(ex.features.indices[t], d.row(t));
  }
}

}  // namespace

std::string_view arch_name(ArchKind arch) {
  switch (arch) {
    case ArchKind::kBaseline: return "baseline";
    case ArchKind::kModelI: return "model1";
    case ArchKind::kModelII: return "model2";
  }
  return "?";
}

std::optional<ArchKind> parse_arch(std::string_view name) {
  if (name == "baseline") return ArchKind::kBaseline;
  if (name == "model1") return ArchKind::kModelI;
  if (name == "model2") return ArchKind::kModelII;
  return std::nullopt;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& why) { throw StructureError("invalid model config: " + why); };
  if (d_e < 1 || d_d < 1 || d_h < 1 || d_hx < 1 || d_hd < 1) fail("all sizes must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (batch_size < 1) fail("batch size must be >= 1");
  if (!(lr > 0.0)) fail("learning rate must be positive");
  if (clip && !(*clip > 0.0)) fail("clip threshold must be positive");
  if (!(dev_split >= 0.0 && dev_split < 1.0)) fail("dev split must lie in [0, 1)");
  if (arch != ArchKind::kBaseline && !scheme) fail("a feature scheme is required for model1/model2");
}

std::vector<Param*> TaggerModel::params() {
  std::vector<Param*> out{&char_embed.table};
  if (feature_embed) out.push_back(&feature_embed->table);
  for (Param* p : encoder.params()) out.push_back(p);
  if (feature_encoder)
    for (Param* p : feature_encoder->params()) out.push_back(p);
  out.push_back(&projection.weight);
  out.push_back(&projection.bias);
  out.push_back(&transitions);
  return out;
}

std::vector<const Param*> TaggerModel::params() const {
  auto mut = const_cast<TaggerModel*>(this)->params();
  return {mut.begin(), mut.end()};
}

std::size_t TaggerModel::feature_dim() const {
  if (!config.uses_features()) return 0;
  return feature_width(*config.scheme, config.d_d);
}

std::size_t TaggerModel::encoder_input_dim() const {
  return config.arch == ArchKind::kModelI ? config.d_e + feature_dim() : config.d_e;
}

std::size_t TaggerModel::crf_input_dim() const {
  return config.arch == ArchKind::kModelII ? 2 * config.d_hx + 2 * config.d_hd : 2 * config.d_h;
}

TaggerModel build_model(const ModelConfig& config, Vocabulary vocab) {
  config.validate();
  TaggerModel m;
  m.config = config;
  if (!config.uses_features()) m.config.scheme.reset();
  m.vocab = std::move(vocab);

  Rng rng(derive_seed(config.seed, kInitStream));
  m.char_embed = EmbeddingTable("char_embed", m.vocab.size(), config.d_e);
  m.char_embed.init(rng);
  if (m.config.scheme && is_embedding_scheme(*m.config.scheme)) {
    m.feature_embed.emplace("feature_embed", label_inventory(*m.config.scheme), config.d_d);
    m.feature_embed->init(rng);
  }
  switch (config.arch) {
    case ArchKind::kBaseline:
    case ArchKind::kModelI:
      m.encoder = BiLstm("encoder", m.encoder_input_dim(), config.d_h);
      m.encoder.init(rng);
      break;
    case ArchKind::kModelII:
      m.encoder = BiLstm("encoder", config.d_e, config.d_hx);
      m.encoder.init(rng);
      m.feature_encoder.emplace("feature_encoder", m.feature_dim(), config.d_hd);
      m.feature_encoder->init(rng);
      break;
  }
  m.projection = Affine("projection", m.crf_input_dim(), Tag::kCount);
  m.projection.init(rng);
  m.transitions = Param("transitions", Tag::kCount + 2, Tag::kCount + 2);
  return m;
}

Example make_example(const TaggerModel& model, const LabeledSentence& sentence,
                     const Dictionary& dict) {
  Example ex;
  ex.chars = sentence.chars;
  ex.char_ids.reserve(sentence.chars.size());
  for (char32_t ch : sentence.chars) ex.char_ids.push_back(model.vocab.index(ch));
  if (model.config.uses_features()) {
    ex.features = extract_features(sentence.chars, dict, *model.config.scheme);
  }
  if (sentence.tags) {
    for (Tag t : *sentence.tags) ex.gold.push_back(t.code());
  }
  return ex;
}

Matrix forward_emissions(const TaggerModel& model, const Example& ex, Mode mode, Rng* rng,
                         ForwardCache* cache) {
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  const Matrix chars = char_inputs(model, ex);
  switch (model.config.arch) {
    case ArchKind::kBaseline:
      c.encoder_input = chars;
      c.hidden = bilstm_forward(model.encoder, c.encoder_input, &c.encoder);
      break;
    case ArchKind::kModelI:
      c.encoder_input = hconcat(chars, feature_inputs(model, ex));
      c.hidden = bilstm_forward(model.encoder, c.encoder_input, &c.encoder);
      break;
    case ArchKind::kModelII: {
      c.encoder_input = chars;
      c.feature_input = feature_inputs(model, ex);
      const Matrix hx = bilstm_forward(model.encoder, c.encoder_input, &c.encoder);
      const Matrix hd = bilstm_forward(*model.feature_encoder, c.feature_input, &c.feature_encoder);
      c.hidden = hconcat(hx, hd);
      break;
    }
  }
  if (mode == Mode::kTrain && model.config.dropout > 0.0) {
    if (!rng) throw StructureError("train-mode forward with dropout needs a generator");
    c.projected_in = dropout_forward(c.hidden, model.config.dropout, mode, *rng, &c.dropout_mask);
  } else {
    c.projected_in = c.hidden;
    c.dropout_mask = Matrix();
  }
  return model.projection.forward(c.projected_in);
}

Matrix forward_model_i(const TaggerModel& model, const Example& ex, Mode mode, Rng* rng,
                       ForwardCache* cache) {
  if (model.config.arch != ArchKind::kModelI) throw StructureError("model is not Model-I");
  return forward_emissions(model, ex, mode, rng, cache);
}

Matrix forward_model_ii(const TaggerModel& model, const Example& ex, Mode mode, Rng* rng,
                        ForwardCache* cache) {
  if (model.config.arch != ArchKind::kModelII) throw StructureError("model is not Model-II");
  return forward_emissions(model, ex, mode, rng, cache);
}

double sentence_loss(const TaggerModel& model, const Example& ex, Mode mode, Rng* rng) {
  if (ex.char_ids.empty()) return 0.0;
  const Matrix em = forward_emissions(model, ex, mode, rng);
  return crf::nll(em, model.transitions.value, ex.gold);
}

double accumulate_gradients(TaggerModel& model, const Example& ex, Mode mode, Rng* rng) {
  if (ex.char_ids.empty()) return 0.0;
  ForwardCache cache;
  const Matrix em = forward_emissions(model, ex, mode, rng, &cache);
  Matrix d_em(em.rows(), em.cols());
  const double loss =
      crf::nll_backward(em, model.transitions.value, ex.gold, d_em, model.transitions.grad);

  Matrix d_hidden = model.projection.backward(cache.projected_in, d_em);
  if (cache.dropout_mask.size() != 0) {
    auto g = d_hidden.flat();
    const auto m = cache.dropout_mask.flat();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] *= m[k];
  }

  switch (model.config.arch) {
    case ArchKind::kBaseline: {
      const Matrix d_in = bilstm_backward(model.encoder, cache.encoder, d_hidden);
      scatter_char_grads(model, ex, d_in);
      break;
    }
    case ArchKind::kModelI: {
      const Matrix d_in = bilstm_backward(model.encoder, cache.encoder, d_hidden);
      auto [d_chars, d_feats] = hsplit(d_in, model.config.d_e);
      scatter_char_grads(model, ex, d_chars);
      scatter_feature_grads(model, ex, d_feats);
      break;
    }
    case ArchKind::kModelII: {
      auto [d_hx, d_hd] = hsplit(d_hidden, model.encoder.output_dim());
      scatter_char_grads(model, ex, bilstm_backward(model.encoder, cache.encoder, d_hx));
      scatter_feature_grads(model, ex,
                            bilstm_backward(*model.feature_encoder, cache.feature_encoder, d_hd));
      break;
    }
  }
  return loss;
}

std::string format_epoch_record(const EpochRecord& record) {
  nlohmann::ordered_json j;
  j["epoch"] = record.epoch;
  j["loss"] = record.loss;
  if (record.dev) {
    j["dev_p"] = record.dev->precision();
    j["dev_r"] = record.dev->recall();
    j["dev_f1"] = record.dev->f1();
  }
  return j.dump();
}

// ---------------------------------------------------------------------------
// Training

struct Trainer::State {
  TaggerModel model;
  Adam adam;
  Dictionary dict;
  std::vector<Example> train;
  std::vector<LabeledSentence> dev;
  Rng shuffle_rng{0};
  Rng dropout_rng{0};
  std::vector<EpochRecord> history;
};

Trainer::Trainer(std::span<const LabeledSentence> corpus, const Dictionary& dict,
                 const ModelConfig& config)
    : state_(std::make_unique<State>()) {
  config.validate();
  if (corpus.empty()) throw DataError("training corpus is empty");
  std::vector<LabeledSentence> clauses;
  for (const auto& s : corpus) {
    if (!s.tagged()) throw DataError("training corpus has no tags");
    if (config.split_clauses) {
      for (auto& c : split_clauses(s))
        if (!c.chars.empty()) clauses.push_back(std::move(c));
    } else if (!s.chars.empty()) {
      clauses.push_back(s);
    }
  }
  if (clauses.empty()) throw DataError("training corpus has no characters");

  auto& st = *state_;
  std::vector<LabeledSentence> train_clauses;
  if (config.dev_split > 0.0 && clauses.size() > 1) {
    std::vector<std::size_t> order(clauses.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng dev_rng(derive_seed(config.seed, kDevStream));
    dev_rng.shuffle(order);
    std::size_t n_dev = static_cast<std::size_t>(std::llround(config.dev_split * clauses.size()));
    n_dev = std::clamp<std::size_t>(n_dev, 1, clauses.size() - 1);
    std::vector<bool> is_dev(clauses.size(), false);
    for (std::size_t k = 0; k < n_dev; ++k) is_dev[order[k]] = true;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      (is_dev[i] ? st.dev : train_clauses).push_back(std::move(clauses[i]));
    }
  } else {
    train_clauses = std::move(clauses);
  }

  st.dict = dict;
  st.model = build_model(config, build_vocab(train_clauses));
  st.model.dict_fingerprint = dict.fingerprint();
  st.adam = Adam(AdamConfig{config.lr});
  st.shuffle_rng = Rng(derive_seed(config.seed, kShuffleStream));
  st.dropout_rng = Rng(derive_seed(config.seed, kDropoutStream));
  st.train.reserve(train_clauses.size());
  for (const auto& c : train_clauses) st.train.push_back(make_example(st.model, c, dict));
}

Trainer::~Trainer() = default;
Trainer::Trainer(Trainer&&) noexcept = default;

EpochRecord Trainer::run_epoch() {
  auto& st = *state_;
  auto& model = st.model;
  const auto& cfg = model.config;
  const auto params = model.params();

  std::vector<std::size_t> order(st.train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  st.shuffle_rng.shuffle(order);

  EpochRecord rec;
  rec.epoch = st.history.size() + 1;
  for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
    for (Param* p : params) p->zero_grad();
    for (std::size_t k = begin; k < end; ++k) {
      rec.loss += accumulate_gradients(model, st.train[order[k]], Mode::kTrain, &st.dropout_rng);
    }
    const double scale = 1.0 / static_cast<double>(end - begin);
    for (Param* p : params)
      for (double& g : p->grad.flat()) g *= scale;
    if (cfg.clip) clip_gradients(params, *cfg.clip);
    st.adam.update(params);
  }
  if (!st.dev.empty()) rec.dev = evaluate(model, st.dev, st.dict).overall;
  st.history.push_back(rec);
  return rec;
}

void Trainer::run(std::ostream* log) {
  auto& st = *state_;
  const auto& cfg = st.model.config;
  const bool early_stop = cfg.patience > 0 && !st.dev.empty();
  double best_f1 = -1.0;
  std::size_t since_best = 0;
  std::vector<Matrix> best;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const EpochRecord rec = run_epoch();
    if (log) *log << format_epoch_record(rec) << '\n';
    if (!early_stop) continue;
    if (rec.dev->f1() > best_f1) {
      best_f1 = rec.dev->f1();
      since_best = 0;
      best.clear();
      for (const Param* p : st.model.params()) best.push_back(p->value);
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  if (early_stop && !best.empty()) {
    auto params = st.model.params();
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  }
  for (Param* p : st.model.params()) p->zero_grad();
}

const TaggerModel& Trainer::model() const { return state_->model; }
TaggerModel& Trainer::model() { return state_->model; }
const std::vector<EpochRecord>& Trainer::history() const { return state_->history; }
std::size_t Trainer::train_size() const { return state_->train.size(); }
std::size_t Trainer::dev_size() const { return state_->dev.size(); }

TrainResult train(std::span<const LabeledSentence> corpus, const Dictionary& dict,
                  const ModelConfig& config, std::ostream* metrics_log) {
  Trainer trainer(corpus, dict, config);
  trainer.run(metrics_log);
  TrainResult out{std::move(trainer.model()), trainer.history()};
  return out;
}

// ---------------------------------------------------------------------------
// Inference

TagResult tag(const TaggerModel& model, std::u32string_view text, const Dictionary& dict,
              std::ostream* warn) {
  TagResult out;
  if (warn && model.config.uses_features() && dict.fingerprint() != model.dict_fingerprint) {
    *warn << "warning: dictionary differs from the one used at training time\n";
  }
  if (text.empty()) return out;
  LabeledSentence whole{std::u32string(text), std::nullopt};
  std::vector<LabeledSentence> clauses;
  if (model.config.split_clauses) {
    clauses = split_clauses(whole);
  } else {
    clauses.push_back(std::move(whole));
  }
  const Matrix* allowed = model.config.constrain_decode ? &crf::bieos_allowed_transitions() : nullptr;
  out.tags.reserve(text.size());
  for (const auto& clause : clauses) {
    const Example ex = make_example(model, clause, dict);
    const Matrix em = forward_emissions(model, ex, Mode::kEval);
    for (int code : crf::viterbi_decode(em, model.transitions.value, allowed).tags) {
      out.tags.push_back(Tag::from_code(code));
    }
  }
  out.spans = tags_to_spans_lenient(out.tags);
  return out;
}

EvalReport evaluate(const TaggerModel& model, std::span<const LabeledSentence> gold,
                    const Dictionary& dict) {
  std::vector<std::vector<EntitySpan>> g, p;
  g.reserve(gold.size());
  p.reserve(gold.size());
  for (const auto& s : gold) {
    if (!s.tags) throw DataError("evaluation corpus has no tags");
    g.push_back(tags_to_spans(*s.tags));
    p.push_back(tag(model, s.chars, dict).spans);
  }
  return micro_prf(g, p);
}

}  // namespace dictner
