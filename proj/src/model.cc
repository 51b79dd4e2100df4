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

#include "gnr/model.h"

#include <cmath>

#include "gnr/errors.h"

namespace gnr {

ScorerParams ScorerParams::Create(ParameterStore &store, const ModelDims &dims,
                                  RngStream &rng) {
  const std::size_t h = dims.hidden;
  ScorerParams p;
  p.sentence = LinearParams::Create(store, "score/sentence", 2 * h, 1, rng);
  p.start = LinearParams::Create(store, "score/start", 2 * h, 1, rng);
  p.end_lstm = BiLstmParams::Create(store, "score/end/lstm", dims.end_depth,
                                    2 * h, h, rng);
  p.end = LinearParams::Create(store, "score/end", 2 * h, 1, rng);
  return p;
}

ScorerParams ScorerParams::Lookup(const ParameterStore &store,
                                  const ModelDims &dims) {
  ScorerParams p;
  p.sentence = LinearParams::Lookup(store, "score/sentence");
  p.start = LinearParams::Lookup(store, "score/start");
  p.end_lstm = BiLstmParams::Lookup(store, "score/end/lstm", dims.end_depth);
  p.end = LinearParams::Lookup(store, "score/end");
  return p;
}

GnrModel::GnrModel(const ModelDims &dims, std::uint64_t init_seed) : dims_(dims) {
  if (dims.depth == 0 || dims.end_depth == 0 || dims.hidden == 0 ||
      dims.embed_dim == 0) {
    throw InputError("model dimensions must be positive");
  }
  RngStream rng(init_seed);
  encoder_ = EncoderParams::Create(store_, dims_, rng);
  scorer_ = ScorerParams::Create(store_, dims_, rng);
}

NeuralScorer::NeuralScorer(DocumentEncoding encoding, const ScorerParams &params,
                           const ForwardOptions &options)
    : encoding_(std::move(encoding)),
      params_(params),
      options_(options),
      starts_(encoding_.num_sentences()) {}

std::size_t NeuralScorer::sentence_length(std::size_t sentence) const {
  return encoding_.sentence_length.at(sentence);
}

Tensor NeuralScorer::SentenceScores() {
  if (sentences_.defined()) return sentences_;
  const Dropout fc = options_.fc();
  std::vector<Tensor> scores;
  for (std::size_t i = 0; i < num_sentences(); ++i) {
    const std::size_t m = encoding_.sentence_length[i];
    Tensor rep = Concat({encoding_.At(i, 0).backward, encoding_.At(i, m - 1).forward});
    scores.push_back(Linear(fc(rep), params_.sentence));
  }
  sentences_ = Concat(scores);
  return sentences_;
}

Tensor NeuralScorer::StartScores(std::size_t sentence) {
  if (sentence >= num_sentences()) {
    throw InputError("sentence index " + std::to_string(sentence) + " out of range");
  }
  Tensor &cached = starts_[sentence];
  if (cached.defined()) return cached;
  const Dropout fc = options_.fc();
  std::vector<Tensor> scores;
  for (std::size_t j = 0; j < encoding_.sentence_length[sentence]; ++j) {
    const BiState &s = encoding_.At(sentence, j);
    scores.push_back(Linear(fc(Concat({s.forward, s.backward})), params_.start));
  }
  cached = Concat(scores);
  return cached;
}

Tensor NeuralScorer::EndScores(std::size_t sentence, std::size_t start) {
  if (sentence >= num_sentences() || start >= encoding_.sentence_length[sentence]) {
    throw InputError("start (" + std::to_string(sentence) + ", " +
                     std::to_string(start) + ") out of range");
  }
  auto it = ends_.find({sentence, start});
  if (it != ends_.end()) return it->second;

  const std::size_t m = encoding_.sentence_length[sentence];
  std::vector<Tensor> remaining;
  for (std::size_t k = start; k < m; ++k) {
    const BiState &s = encoding_.At(sentence, k);
    remaining.push_back(Concat({s.forward, s.backward}));
  }
  const std::vector<BiState> span_states =
      BiLstmStack(remaining, params_.end_lstm, options_.recurrent());
  const Dropout fc = options_.fc();
  std::vector<Tensor> scores;
  for (const BiState &s : span_states) {
    scores.push_back(Linear(fc(Concat({s.forward, s.backward})), params_.end));
  }
  Tensor out = Concat(scores);
  ends_.emplace(std::make_pair(sentence, start), out);
  return out;
}

std::unique_ptr<NeuralScorer> BuildScorer(const GnrModel &model,
                                          const TokenizedDocument &doc,
                                          std::span<const Token> question,
                                          const WordVectorTable &table,
                                          const ForwardOptions &options,
                                          std::size_t max_tokens) {
  if (table.dim() != model.dims().embed_dim) {
    throw InputError("word vectors have dimension " + std::to_string(table.dim()) +
                     ", model expects " + std::to_string(model.dims().embed_dim));
  }
  QuestionEncoding q = EncodeQuestion(question, table, model.encoder(), options);
  DocumentEncoding d =
      EncodeDocument(doc, q, question, table, model.encoder(), options, max_tokens);
  return std::make_unique<NeuralScorer>(std::move(d), model.scorer(), options);
}

TrainStepResult TrainStep(const QAExample &example, GnrModel &model,
                          const WordVectorTable &table,
                          const TrainOptions &options, RngStream &rng) {
  if (!example.document.IsValid(example.answer)) {
    throw DataError("example '" + example.id + "' has an out-of-range gold answer");
  }
  const WeightNoise noise = PerturbWeights(model.store(), options.weight_noise, rng);
  TrainStepResult result;
  try {
    ForwardOptions fwd;
    fwd.training = true;
    fwd.rng = &rng;
    fwd.recurrent_dropout = options.recurrent_dropout;
    fwd.fc_dropout = options.fc_dropout;
    auto scorer = BuildScorer(model, example.document, example.question_tokens,
                              table, fwd, options.max_tokens);
    LossResult loss = SearchLoss(*scorer, example.answer, options.beam_width,
                                 options.normalization);
    result.loss = loss.loss.item();
    result.early_update = loss.early_update;
    result.end_scorer_calls = scorer->end_scorer_calls();
    if (!std::isfinite(result.loss)) {
      throw NumericError("non-finite loss " + std::to_string(result.loss) +
                         " on example '" + example.id + "'");
    }
    Scale(loss.loss, options.loss_scale).Backward();
  } catch (...) {
    RemoveWeightNoise(model.store(), noise);
    throw;
  }
  RemoveWeightNoise(model.store(), noise);
  return result;
}

Prediction Predict(const TokenizedDocument &doc, std::span<const Token> question,
                   const GnrModel &model, const WordVectorTable &table,
                   std::size_t beam_width, std::size_t max_tokens) {
  if (doc.num_tokens() == 0) throw InputError("cannot predict on an empty document");
  auto scorer = BuildScorer(model, doc, question, table, ForwardOptions{}, max_tokens);
  const Beam beam = BeamDecode(*scorer, beam_width);
  const std::vector<double> probs = BeamProbabilities(beam);
  Prediction p;
  p.answer = beam.top().tuple;
  p.score = beam.top().score;
  p.probability = probs.front();
  p.text = doc.SpanText(p.answer);
  p.end_scorer_calls = scorer->end_scorer_calls();
  return p;
}

}  // namespace gnr
