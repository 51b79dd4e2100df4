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

// SQuAD-style answer scoring.

#ifndef GNR_EVAL_H_
#define GNR_EVAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnr/dataset.h"
#include "gnr/text.h"

namespace gnr {

// Lowercase, drop punctuation, drop the articles a/an/the, collapse
// whitespace.
std::string NormalizeAnswer(std::string_view text);

int ExactMatch(std::string_view prediction, std::span<const std::string> golds);
double F1Score(std::string_view prediction, std::span<const std::string> golds);
// 1 iff both tuples pick the same sentence.
int SentenceMatch(const AnswerTuple &predicted, const AnswerTuple &gold);
// Checks both tuples against the document first.
int SentenceMatch(const TokenizedDocument &doc, const AnswerTuple &predicted,
                  const AnswerTuple &gold);

struct Metrics {
  double exact_match = 0.0;        // percent
  double f1 = 0.0;                 // percent
  double sentence_accuracy = 0.0;  // percent
  std::size_t count = 0;
};

struct ExampleScore {
  std::string id;
  std::string prediction_text;
  int em = 0;
  double f1 = 0.0;
  int sentence = 0;
};

ExampleScore ScoreExample(const QAExample &example, const AnswerTuple &predicted);
ExampleScore ScoreExample(const QAExample &example, std::string prediction_text,
                          const AnswerTuple &predicted);
// Plain means over the examples, as percentages. Throws on an empty list.
Metrics Aggregate(std::span<const ExampleScore> scores);

// JSON lines: one {id, prediction_text, em, f1, sentence} object per
// example, then the aggregate {exact_match, f1, sentence, count}.
std::string RenderReport(std::span<const ExampleScore> scores,
                         const Metrics &metrics);

}  // namespace gnr

#endif  // GNR_EVAL_H_
