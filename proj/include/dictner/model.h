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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dictner/corpus.h"
#include "dictner/dictionary.h"
#include "dictner/eval.h"
#include "dictner/features.h"
#include "dictner/lstm.h"
#include "dictner/tensor.h"

namespace dictner {

enum class ArchKind { kBaseline, kModelI, kModelII };

/// CLI spelling: baseline, model1, model2.
std::string_view arch_name(ArchKind arch);
std::optional<ArchKind> parse_arch(std::string_view name);

/// Hyperparameters. The defaults are the published configuration.
struct ModelConfig {
  ArchKind arch = ArchKind::kModelI;
  std::optional<FeatureScheme> scheme = FeatureScheme::kPdetEmbed;  // ignored by Baseline
  std::size_t d_e = 128;   // character embedding width
  std::size_t d_d = 128;   // feature embedding width (embedding schemes)
  std::size_t d_h = 256;   // hidden units, Baseline and Model-I
  std::size_t d_hx = 128;  // Model-II character stream
  std::size_t d_hd = 128;  // Model-II feature stream
  double dropout = 0.2;
  std::size_t batch_size = 128;
  std::size_t epochs = 30;
  std::uint64_t seed = 2017;
  double lr = 0.001;
  std::optional<double> clip;  // global gradient-norm bound
  double dev_split = 0.0;      // fraction of clauses held out for early stopping
  std::size_t patience = 0;    // epochs without dev improvement; 0 disables
  bool split_clauses = true;   // applied at training and tagging time
  bool constrain_decode = false;

  /// Throws StructureError describing the first inconsistency.
  void validate() const;
  bool uses_features() const { return arch != ArchKind::kBaseline; }
};

/// All parameters of a tagger together with what is needed to rebuild its
/// inputs.
struct TaggerModel {
  ModelConfig config;
  Vocabulary vocab;
  EmbeddingTable char_embed;
  std::optional<EmbeddingTable> feature_embed;
  BiLstm encoder;                         // the character stream in Model-II
  std::optional<BiLstm> feature_encoder;  // Model-II only
  Affine projection;                      // encoder output -> tag scores
  Param transitions;                      // (K+2) x (K+2)
  std::uint64_t dict_fingerprint = 0;

  std::vector<Param*> params();
  std::vector<const Param*> params() const;

  /// Width of d_i; 0 for Baseline.
  std::size_t feature_dim() const;
  /// Input width of the (first) Bi-LSTM.
  std::size_t encoder_input_dim() const;
  /// Width of the vector fed to the scoring layer in front of the CRF.
  std::size_t crf_input_dim() const;
};

/// Allocates and initializes every tensor from `config.seed`.
TaggerModel build_model(const ModelConfig& config, Vocabulary vocab);

/// One sentence converted to model inputs.
struct Example {
  std::u32string chars;
  std::vector<int> char_ids;
  SentenceFeatures features;  // empty for Baseline
  std::vector<int> gold;      // tag codes; empty when untagged
};

Example make_example(const TaggerModel& model, const LabeledSentence& sentence,
                     const Dictionary& dict);

/// Intermediate values kept for the backward pass.
struct ForwardCache {
  Matrix encoder_input;
  BiLstmTrace encoder;
  Matrix feature_input;
  BiLstmTrace feature_encoder;
  Matrix hidden;         // concatenated Bi-LSTM outputs before dropout
  Matrix dropout_mask;   // empty in eval mode
  Matrix projected_in;   // after dropout
};

/// Emission scores (T x 21). `rng` drives dropout and is only read in train
/// mode.
Matrix forward_emissions(const TaggerModel& model, const Example& ex, Mode mode,
                         Rng* rng = nullptr, ForwardCache* cache = nullptr);
/// Concatenate-then-encode path. Throws unless the model is Model-I.
Matrix forward_model_i(const TaggerModel& model, const Example& ex, Mode mode,
                       Rng* rng = nullptr, ForwardCache* cache = nullptr);
/// Two independent encoders concatenated. Throws unless the model is Model-II.
Matrix forward_model_ii(const TaggerModel& model, const Example& ex, Mode mode,
                        Rng* rng = nullptr, ForwardCache* cache = nullptr);

/// Negative log-likelihood of the gold path without touching gradients.
double sentence_loss(const TaggerModel& model, const Example& ex, Mode mode,
                     Rng* rng = nullptr);
/// Forward plus backward: returns the loss and adds its gradient to every
/// parameter's accumulator.
double accumulate_gradients(TaggerModel& model, const Example& ex, Mode mode,
                            Rng* rng = nullptr);

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;             // summed over training clauses
  std::optional<PrfCounts> dev;  // present when a dev split is configured
};

/// One JSON object per line.
std::string format_epoch_record(const EpochRecord& record);

/// Incremental training loop. Clauses, features and batches are prepared once
/// in the constructor; each run_epoch() is one seeded shuffle plus one Adam
/// step per batch.
class Trainer {
 public:
  Trainer(std::span<const LabeledSentence> corpus, const Dictionary& dict,
          const ModelConfig& config);
  ~Trainer();
  Trainer(Trainer&&) noexcept;

  EpochRecord run_epoch();
  /// Runs the configured epoch count, stopping early on dev patience and
  /// restoring the best dev snapshot. Each record goes to `log` if given.
  void run(std::ostream* log = nullptr);

  const TaggerModel& model() const;
  TaggerModel& model();
  const std::vector<EpochRecord>& history() const;
  std::size_t train_size() const;
  std::size_t dev_size() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

struct TrainResult {
  TaggerModel model;
  std::vector<EpochRecord> log;
};

/// Throws DataError on an empty or untagged corpus.
TrainResult train(std::span<const LabeledSentence> corpus, const Dictionary& dict,
                  const ModelConfig& config, std::ostream* metrics_log = nullptr);

struct TagResult {
  std::vector<Tag> tags;          // raw Viterbi output
  std::vector<EntitySpan> spans;  // lenient decoding of `tags`
};

/// Eval-mode tagging. Unknown characters use the UNK row. A dictionary whose
/// fingerprint differs from the training one triggers a warning on `warn`.
TagResult tag(const TaggerModel& model, std::u32string_view text, const Dictionary& dict,
              std::ostream* warn = nullptr);

/// Tags every sentence and scores the spans against the gold tags.
EvalReport evaluate(const TaggerModel& model, std::span<const LabeledSentence> gold,
                    const Dictionary& dict);

void save_model(const TaggerModel& model, std::ostream& out);
void save_model_file(const TaggerModel& model, const std::string& path);
/// Throws DataError on version mismatch, corruption or inconsistent shapes.
TaggerModel load_model(std::istream& in);
TaggerModel load_model_file(const std::string& path);

enum class EmbeddingTarget { kCharacters, kFeatures };

/// Overwrites rows named in a `<count> <dim>` text embedding file. Returns
/// the fraction of real rows (characters or label names) that were covered.
double load_pretrained_embeddings(TaggerModel& model, std::istream& in,
                                  EmbeddingTarget target = EmbeddingTarget::kCharacters);

}  // namespace dictner
