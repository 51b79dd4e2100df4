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

// SQuAD v1.1 ingestion and gold-answer alignment.

#ifndef GNR_DATASET_H_
#define GNR_DATASET_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gnr/errors.h"
#include "gnr/text.h"

namespace gnr {

struct QAExample {
  std::string id;
  std::string title;
  TokenizedDocument document;
  std::string question;
  std::vector<Token> question_tokens;
  // First listed gold answer; the one used for training.
  std::string answer_text;
  std::size_t answer_start = 0;  // byte offset into document.text
  // Every listed gold answer text, for max-over-gold evaluation.
  std::vector<std::string> gold_answers;
  AnswerTuple answer;
};

class AlignmentError : public DataError {
 public:
  AlignmentError(std::string reason, const std::string &detail)
      : DataError(reason + ": " + detail), reason_(std::move(reason)) {}
  // One of "out-of-bounds", "cross-sentence", "text-mismatch".
  const std::string &reason() const { return reason_; }

 private:
  std::string reason_;
};

struct AlignedSpan {
  AnswerTuple tuple;
  std::size_t byte_begin = 0;  // first answer byte after skipping whitespace
  std::size_t byte_end = 0;    // one past the last answer byte
};

// Locates the answer starting at a byte offset. The answer text must equal
// the source text once all whitespace is removed from both; the covering
// tokens must lie in one sentence. Tokens that only partly overlap the
// answer are included whole.
AlignedSpan AlignAnswerAtByte(const TokenizedDocument &doc,
                              std::string_view answer_text,
                              std::size_t byte_start);

// Same, with the start given in code points as in SQuAD files.
AnswerTuple AlignAnswer(const TokenizedDocument &doc,
                        std::string_view answer_text,
                        std::size_t answer_char_start);

// Throws DataError when an example breaks a structural invariant: offsets
// out of order or out of bounds, token text disagreeing with the source,
// empty sentences or tokens, or a gold tuple that does not cover the answer.
void CheckExample(const QAExample &example);

// Builds an example from raw strings; throws AlignmentError or DataError.
QAExample MakeExample(std::string id, std::string title, std::string context,
                      std::string question, std::string answer_text,
                      std::size_t answer_char_start,
                      std::vector<std::string> gold_answers = {});

struct IngestionReport {
  std::size_t questions = 0;
  std::size_t loaded = 0;
  std::map<std::string, std::size_t> dropped;  // reason -> count

  std::size_t total_dropped() const;
  // Deterministic one-line JSON rendering.
  std::string ToJson() const;
};

struct LoadedDataset {
  std::vector<QAExample> examples;
  IngestionReport report;
};

LoadedDataset ParseSquad(std::string_view json_text);
LoadedDataset LoadSquad(const std::string &path);

// SQuAD v1.1 JSON for a set of examples. Consecutive examples that share a
// title and context share a paragraph.
std::string ToSquadJson(const std::vector<QAExample> &examples);
void WriteSquad(const std::string &path, const std::vector<QAExample> &examples);

// One JSON object per line, mirroring the QAExample fields.
std::string ToCacheLine(const QAExample &example);
QAExample FromCacheLine(std::string_view line);
void WriteCache(const std::string &path, const std::vector<QAExample> &examples);
std::vector<QAExample> ReadCache(const std::string &path);

std::string ReadFile(const std::string &path);

}  // namespace gnr

#endif  // GNR_DATASET_H_
