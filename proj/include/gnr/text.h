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

#ifndef GNR_TEXT_H_
#define GNR_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gnr {

struct Token {
  std::string text;
  std::size_t offset = 0;  // byte offset into the source text

  std::size_t end() const { return offset + text.size(); }
  bool operator==(const Token &) const = default;
};

// (sentence, start word, end word), all 0-based, start <= end.
struct AnswerTuple {
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const AnswerTuple &) const = default;
};

struct TokenizedDocument {
  std::string text;
  std::vector<std::vector<Token>> sentences;

  std::size_t num_sentences() const { return sentences.size(); }
  std::size_t num_tokens() const;
  // Source text covered by tokens [start, end] of one sentence.
  std::string SpanText(std::size_t sentence, std::size_t start,
                       std::size_t end) const;
  std::string SpanText(const AnswerTuple &a) const {
    return SpanText(a.sentence, a.start, a.end);
  }
  bool IsValid(const AnswerTuple &a) const;
};

// Whitespace split, then leading and trailing punctuation peeled off one
// character at a time. Punctuation inside a word ("well-known", "don't",
// "3.5") stays attached.
std::vector<Token> Tokenize(std::string_view text);

const std::vector<std::string> &DefaultAbbreviations();

// Sentence boundary after ".", "!" or "?" unless the next token starts with
// a lowercase letter or the period closes a known abbreviation (matched
// case-insensitively against the preceding word). Closing quotes and
// brackets directly after the terminator stay in the ending sentence.
std::vector<std::vector<Token>> SplitSentences(
    const std::vector<Token> &tokens,
    const std::vector<std::string> &abbreviations = DefaultAbbreviations());

TokenizedDocument MakeDocument(std::string text);

}  // namespace gnr

#endif  // GNR_TEXT_H_
