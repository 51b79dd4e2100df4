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

#include "gnr/encoders.h"

#include <unordered_set>

#include "gnr/errors.h"
#include "gnr/unicode.h"

namespace gnr {

EncoderParams EncoderParams::Create(ParameterStore &store,
                                    const ModelDims &dims, RngStream &rng) {
  const std::size_t h = dims.hidden;
  EncoderParams p;
  p.question_lstm =
      BiLstmParams::Create(store, "question/lstm", dims.depth, dims.embed_dim, h, rng);
  p.question_attention =
      MlpParams::Create(store, "question/attention", 2 * h, h, h, rng);
  p.question_query = store.Add("question/query", {h}, GlorotUniform(h, 1, rng));
  p.align = MlpParams::Create(store, "align", dims.embed_dim, h, h, rng);
  p.document_lstm = BiLstmParams::Create(store, "document/lstm", dims.depth,
                                         dims.document_input_width(), h, rng);
  return p;
}

EncoderParams EncoderParams::Lookup(const ParameterStore &store,
                                    const ModelDims &dims) {
  EncoderParams p;
  p.question_lstm = BiLstmParams::Lookup(store, "question/lstm", dims.depth);
  p.question_attention = MlpParams::Lookup(store, "question/attention");
  p.question_query = store.Get("question/query");
  p.align = MlpParams::Lookup(store, "align");
  p.document_lstm = BiLstmParams::Lookup(store, "document/lstm", dims.depth);
  return p;
}

QuestionEncoding EncodeQuestion(std::span<const Token> tokens,
                                const WordVectorTable &table,
                                const EncoderParams &params,
                                const ForwardOptions &options) {
  if (tokens.empty()) throw InputError("cannot encode an empty question");
  QuestionEncoding enc;
  for (const Token &t : tokens) enc.word_vectors.push_back(table.Vector(t.text));
  enc.states = BiLstmStack(enc.word_vectors, params.question_lstm, options.recurrent());

  const Dropout fc = options.fc();
  std::vector<Tensor> scores, pooled;
  for (const BiState &s : enc.states) {
    Tensor both = Concat({s.backward, s.forward});
    scores.push_back(Dot(params.question_query, Mlp2(both, params.question_attention, fc)));
    pooled.push_back(std::move(both));
  }
  enc.attention_scores = Concat(scores);
  enc.attention = Softmax(enc.attention_scores);
  enc.independent = WeightedSum(enc.attention, pooled);
  enc.summary = Concat({enc.states.front().backward, enc.states.back().forward,
                        enc.independent});
  return enc;
}

namespace {

AlignedEmbedding AlignProjected(const Tensor &word_projection,
                                std::span<const Tensor> question_projections,
                                std::span<const Tensor> question_vectors) {
  std::vector<Tensor> scores;
  scores.reserve(question_projections.size());
  for (const Tensor &qp : question_projections) scores.push_back(Dot(word_projection, qp));
  AlignedEmbedding out;
  out.weights = Softmax(Concat(scores));
  out.value = WeightedSum(out.weights, question_vectors);
  return out;
}

}  // namespace

AlignedEmbedding QuestionAlignedEmbedding(
    const Tensor &word_vector, std::span<const Tensor> question_vectors,
    const MlpParams &align, const Dropout &dropout) {
  if (question_vectors.empty()) {
    throw InputError("question-aligned embedding needs at least one question word");
  }
  std::vector<Tensor> projections;
  for (const Tensor &q : question_vectors) projections.push_back(Mlp2(q, align, dropout));
  return AlignProjected(Mlp2(word_vector, align, dropout), projections,
                        question_vectors);
}

std::vector<WordFlags> BooleanFeatures(const TokenizedDocument &doc,
                                       std::span<const Token> question) {
  std::unordered_set<std::string> in_question;
  for (const Token &t : question) in_question.insert(Lowercase(t.text));
  std::unordered_set<std::string> seen;
  std::vector<WordFlags> flags;
  flags.reserve(doc.num_tokens());
  for (const auto &sentence : doc.sentences) {
    for (const Token &t : sentence) {
      std::string lower = Lowercase(t.text);
      WordFlags f;
      f.in_question = in_question.contains(lower);
      f.repeated = !seen.insert(std::move(lower)).second;
      flags.push_back(f);
    }
  }
  return flags;
}

DocumentEncoding EncodeDocument(const TokenizedDocument &doc,
                                const QuestionEncoding &question,
                                std::span<const Token> question_tokens,
                                const WordVectorTable &table,
                                const EncoderParams &params,
                                const ForwardOptions &options,
                                std::size_t max_tokens) {
  const std::size_t n = doc.num_tokens();
  if (n == 0) throw InputError("cannot encode an empty document");
  if (max_tokens > 0 && n > max_tokens) {
    throw InputError("document has " + std::to_string(n) +
                     " tokens, above the configured cap of " +
                     std::to_string(max_tokens));
  }
  if (question.word_vectors.empty()) {
    throw InputError("question encoding has no words");
  }

  const Dropout fc = options.fc();
  std::vector<Tensor> question_projections;
  for (const Tensor &q : question.word_vectors) {
    question_projections.push_back(Mlp2(q, params.align, fc));
  }
  const std::vector<WordFlags> flags = BooleanFeatures(doc, question_tokens);

  DocumentEncoding enc;
  enc.inputs.reserve(n);
  std::size_t flat = 0;
  for (const auto &sentence : doc.sentences) {
    enc.sentence_begin.push_back(flat);
    enc.sentence_length.push_back(sentence.size());
    for (const Token &t : sentence) {
      const Tensor &word = table.Vector(t.text);
      AlignedEmbedding aligned = AlignProjected(
          Mlp2(word, params.align, fc), question_projections, question.word_vectors);
      Tensor feature_flags = Tensor::Constant(
          {2}, {flags[flat].in_question ? 1.0 : 0.0, flags[flat].repeated ? 1.0 : 0.0});
      enc.inputs.push_back(
          Concat({word, question.summary, feature_flags, aligned.value}));
      enc.align_weights.push_back(std::move(aligned.weights));
      ++flat;
    }
  }
  enc.states = BiLstmStack(enc.inputs, params.document_lstm, options.recurrent());
  return enc;
}

}  // namespace gnr
