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

// Question encoder and question-aware document encoder.
//
// The question is read by a bidirectional stack; an attention over its
// positions pools a passage-independent embedding, and the question vector
// concatenates the first backward state, the last forward state and that
// embedding (width 4h). Each document word is fed to a second stack as
// [word vector; question vector; in-question flag; repeated flag;
//  question-aligned embedding], width 2D + 4h + 2.

#ifndef GNR_ENCODERS_H_
#define GNR_ENCODERS_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gnr/embeddings.h"
#include "gnr/nn.h"
#include "gnr/tensor.h"
#include "gnr/text.h"

namespace gnr {

struct ModelDims {
  std::size_t depth = 3;        // question and document stacks
  std::size_t hidden = 200;     // every recurrent layer
  std::size_t embed_dim = 300;  // word vectors
  std::size_t end_depth = 1;    // end-of-span stack

  std::size_t question_width() const { return 4 * hidden; }
  std::size_t document_input_width() const {
    return 2 * embed_dim + 4 * hidden + 2;
  }
};

// Regularization switches for one forward pass.
struct ForwardOptions {
  bool training = false;
  RngStream *rng = nullptr;
  double recurrent_dropout = 0.3;
  double fc_dropout = 0.4;

  Dropout recurrent() const { return {recurrent_dropout, rng, training}; }
  Dropout fc() const { return {fc_dropout, rng, training}; }
};

struct EncoderParams {
  BiLstmParams question_lstm;
  MlpParams question_attention;  // 2h -> h -> h
  Tensor question_query;         // [h]
  MlpParams align;               // D -> h -> h, shared by words and question
  BiLstmParams document_lstm;

  static EncoderParams Create(ParameterStore &store, const ModelDims &dims,
                              RngStream &rng);
  static EncoderParams Lookup(const ParameterStore &store,
                              const ModelDims &dims);
};

struct QuestionEncoding {
  std::vector<BiState> states;
  std::vector<Tensor> word_vectors;  // q_k, frozen
  Tensor attention_scores;           // s_j
  Tensor attention;                  // alpha_j
  Tensor independent;                // width 2h
  Tensor summary;                    // width 4h
};

QuestionEncoding EncodeQuestion(std::span<const Token> tokens,
                                const WordVectorTable &table,
                                const EncoderParams &params,
                                const ForwardOptions &options = {});

struct AlignedEmbedding {
  Tensor weights;  // alpha over question words
  Tensor value;    // sum_k alpha_k q_k
};

// Attention of one document word over the question words using the shared
// alignment MLP; the result mixes the raw question word vectors.
AlignedEmbedding QuestionAlignedEmbedding(
    const Tensor &word_vector, std::span<const Tensor> question_vectors,
    const MlpParams &align, const Dropout &dropout = {});

struct WordFlags {
  bool in_question = false;
  bool repeated = false;  // same lowercase token earlier in the document
  bool operator==(const WordFlags &) const = default;
};

// Per-word flags in document order (sentences flattened).
std::vector<WordFlags> BooleanFeatures(const TokenizedDocument &doc,
                                       std::span<const Token> question);

struct DocumentEncoding {
  std::vector<BiState> states;          // flattened over sentences
  std::vector<std::size_t> sentence_begin;
  std::vector<std::size_t> sentence_length;
  std::vector<Tensor> inputs;           // assembled per-word features
  std::vector<Tensor> align_weights;    // alpha_{i,j,.} per word

  std::size_t num_sentences() const { return sentence_begin.size(); }
  const BiState &At(std::size_t sentence, std::size_t word) const {
    return states[sentence_begin[sentence] + word];
  }
};

// Encodes the whole document as one sequence; recurrent state carries across
// sentence boundaries. max_tokens == 0 disables the length cap.
DocumentEncoding EncodeDocument(const TokenizedDocument &doc,
                                const QuestionEncoding &question,
                                std::span<const Token> question_tokens,
                                const WordVectorTable &table,
                                const EncoderParams &params,
                                const ForwardOptions &options = {},
                                std::size_t max_tokens = 0);

}  // namespace gnr

#endif  // GNR_ENCODERS_H_
