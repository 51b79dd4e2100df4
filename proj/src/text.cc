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

#include "gnr/text.h"

#include <algorithm>

#include "gnr/errors.h"
#include "gnr/unicode.h"

namespace gnr {

std::size_t TokenizedDocument::num_tokens() const {
  std::size_t n = 0;
  for (const auto &s : sentences) n += s.size();
  return n;
}

bool TokenizedDocument::IsValid(const AnswerTuple &a) const {
  return a.sentence < sentences.size() && a.start <= a.end &&
         a.end < sentences[a.sentence].size();
}

std::string TokenizedDocument::SpanText(std::size_t sentence, std::size_t start,
                                        std::size_t end) const {
  if (!IsValid({sentence, start, end})) {
    throw InputError("span (" + std::to_string(sentence) + ", " +
                     std::to_string(start) + ", " + std::to_string(end) +
                     ") is out of range");
  }
  const auto &s = sentences[sentence];
  return text.substr(s[start].offset, s[end].end() - s[start].offset);
}

namespace {

struct Piece {
  std::size_t pos;
  std::size_t len;
  char32_t cp;
};

}  // namespace

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t len;
    char32_t cp = DecodeUtf8(text, pos, &len);
    if (IsSpace(cp)) {
      pos += len;
      continue;
    }
    // Collect one whitespace-delimited chunk as code points.
    std::vector<Piece> chunk;
    while (pos < text.size()) {
      cp = DecodeUtf8(text, pos, &len);
      if (IsSpace(cp)) break;
      chunk.push_back({pos, len, cp});
      pos += len;
    }
    std::size_t lo = 0, hi = chunk.size();
    std::vector<Token> tail;
    while (lo < hi && IsPunctuation(chunk[lo].cp)) {
      tokens.push_back({std::string(text.substr(chunk[lo].pos, chunk[lo].len)),
                        chunk[lo].pos});
      ++lo;
    }
    while (hi > lo && IsPunctuation(chunk[hi - 1].cp)) {
      --hi;
      tail.push_back({std::string(text.substr(chunk[hi].pos, chunk[hi].len)),
                      chunk[hi].pos});
    }
    if (lo < hi) {
      const std::size_t start = chunk[lo].pos;
      const std::size_t stop = chunk[hi - 1].pos + chunk[hi - 1].len;
      tokens.push_back({std::string(text.substr(start, stop - start)), start});
    }
    tokens.insert(tokens.end(), tail.rbegin(), tail.rend());
  }
  return tokens;
}

const std::vector<std::string> &DefaultAbbreviations() {
  static const std::vector<std::string> kAbbreviations = {
      "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs", "gen", "col",
      "lt", "sgt", "capt", "gov", "sen", "rep", "rev", "inc", "ltd", "co",
      "corp", "no", "mt", "ft", "e.g", "i.e", "u.s", "u.k", "approx", "est",
  };
  return kAbbreviations;
}

namespace {

bool IsTerminator(const std::string &t) {
  return t == "." || t == "!" || t == "?";
}

bool IsCloser(const std::string &t) {
  return t == "\"" || t == "'" || t == ")" || t == "]" || t == "}" ||
         t == "”" || t == "’" || IsTerminator(t);
}

bool StartsLowercase(const std::string &t) {
  std::size_t len;
  return !t.empty() && IsLowercase(DecodeUtf8(t, 0, &len));
}

}  // namespace

std::vector<std::vector<Token>> SplitSentences(
    const std::vector<Token> &tokens,
    const std::vector<std::string> &abbreviations) {
  std::vector<std::vector<Token>> sentences;
  std::vector<Token> current;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    current.push_back(tokens[i]);
    if (!IsTerminator(tokens[i].text)) continue;
    if (tokens[i].text == "." && i > 0 && tokens[i - 1].end() == tokens[i].offset) {
      const std::string prev = Lowercase(tokens[i - 1].text);
      if (std::find(abbreviations.begin(), abbreviations.end(), prev) !=
          abbreviations.end()) {
        continue;
      }
    }
    while (i + 1 < tokens.size() && IsCloser(tokens[i + 1].text) &&
           tokens[i + 1].offset == tokens[i].end()) {
      current.push_back(tokens[++i]);
    }
    if (i + 1 < tokens.size() && StartsLowercase(tokens[i + 1].text)) continue;
    sentences.push_back(std::move(current));
    current.clear();
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

TokenizedDocument MakeDocument(std::string text) {
  TokenizedDocument doc;
  doc.text = std::move(text);
  doc.sentences = SplitSentences(Tokenize(doc.text));
  return doc;
}

}  // namespace gnr
