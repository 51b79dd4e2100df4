// Copyright 2026 The GNR Authors.
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

#ifndef GNR_MODEL_H_
#define GNR_MODEL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gnr/dataset.h"
#include "gnr/embeddings.h"
#include "gnr/encoders.h"
#include "gnr/nn.h"
#include "gnr/search.h"

namespace gnr {

struct ScorerParams {
  LinearParams sentence;  // [h_bwd(first word); h_fwd(last word)] -> 1
  LinearParams start;     // [h_fwd; h_bwd] -> 1
  BiLstmParams end_lstm;  // over [h_fwd; h_bwd] from the start word on
  LinearParams end;       // [h~_fwd; h~_bwd] -> 1

  static ScorerParams Create(ParameterStore &store, const ModelDims &dims,
                             RngStream &rng);
  static ScorerParams Lookup(const ParameterStore &store, const ModelDims &dims);
};

class GnrModel {
 public:
  GnrModel(const ModelDims &dims, std::uint64_t init_seed);

  const ModelDims &dims() const { return dims_; }
  ParameterStore &store() { return store_; }
  const ParameterStore &store() const { return store_; }
  const EncoderParams &encoder() const { return encoder_; }
  const ScorerParams &scorer() const { return scorer_; }

 private:
  ModelDims dims_;
  ParameterStore store_;
  EncoderParams encoder_;
  ScorerParams scorer_;
};

// Stage scores computed from a document encoding. End scores run the end
// stack only for the (sentence, start) pairs that are asked for.
class NeuralScorer : public StageScorer {
 public:
  NeuralScorer(DocumentEncoding encoding, const ScorerParams &params,
               const ForwardOptions &options);

  std::size_t num_sentences() const override { return encoding_.num_sentences(); }
  std::size_t sentence_length(std::size_t sentence) const override;
  Tensor SentenceScores() override;
  Tensor StartScores(std::size_t sentence) override;
  Tensor EndScores(std::size_t sentence, std::size_t start) override;
  std::size_t end_scorer_calls() const override { return ends_.size(); }

  const DocumentEncoding &encoding() const { return encoding_; }

 private:
  DocumentEncoding encoding_;
  const ScorerParams &params_;
  ForwardOptions options_;
  Tensor sentences_;
  std::vector<Tensor> starts_;
  std::map<std::pair<std::size_t, std::size_t>, Tensor> ends_;
};

// Runs both encoders and wraps the result in a scorer.
std::unique_ptr<NeuralScorer> BuildScorer(const GnrModel &model,
                                          const TokenizedDocument &doc,
                                          std::span<const Token> question,
                                          const WordVectorTable &table,
                                          const ForwardOptions &options,
                                          std::size_t max_tokens = 0);

struct TrainOptions {
  std::size_t beam_width = 32;
  Normalization normalization = Normalization::kGlobal;
  double recurrent_dropout = 0.3;
  double fc_dropout = 0.4;
  double weight_noise = 1e-6;
  // Multiplies the loss before back-propagation, e.g. 1 / batch size.
  double loss_scale = 1.0;
  std::size_t max_tokens = 0;
};

struct TrainStepResult {
  double loss = 0.0;
  std::optional<Stage> early_update;
  std::size_t end_scorer_calls = 0;
};

// Forward and backward pass for one example. Gradients accumulate into the
// model's parameter store; the caller applies the optimizer. Recurrent
// weight noise is added for the duration of the step and then removed.
TrainStepResult TrainStep(const QAExample &example, GnrModel &model,
                          const WordVectorTable &table,
                          const TrainOptions &options, RngStream &rng);

struct Prediction {
  AnswerTuple answer;
  double score = 0.0;
  // exp(score - log Z) over the final beam.
  double probability = 0.0;
  std::string text;
  std::size_t end_scorer_calls = 0;
};

Prediction Predict(const TokenizedDocument &doc, std::span<const Token> question,
                   const GnrModel &model, const WordVectorTable &table,
                   std::size_t beam_width, std::size_t max_tokens = 0);

}  // namespace gnr

#endif  // GNR_MODEL_H_
