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

#include "gnr/eval.h"

#include <algorithm>
#include <map>

#include "json.hpp"
#include "gnr/errors.h"
#include "gnr/unicode.h"

namespace gnr {
namespace {

bool IsWordChar(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
           (cp >= U'0' && cp <= U'9') || cp == U'_';
  }
  return !IsSpace(cp) && !IsPunctuation(cp);
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t len;
    const char32_t cp = DecodeUtf8(text, pos, &len);
    if (IsSpace(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(pos, len));
    }
    pos += len;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

void RequireGolds(std::span<const std::string> golds) {
  if (golds.empty()) throw InputError("scoring needs at least one gold answer");
}

double F1Single(const std::vector<std::string> &pred,
                const std::vector<std::string> &gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto &t : gold) ++counts[t];
  int same = 0;
  for (const auto &t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++same;
    }
  }
  if (same == 0) return 0.0;
  const double precision = static_cast<double>(same) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(same) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

std::string NormalizeAnswer(std::string_view text) {
  // Same order as the reference script: lower, punctuation, articles,
  // whitespace.
  const std::string lower = Lowercase(text);
  std::string no_punct;
  no_punct.reserve(lower.size());
  for (std::size_t pos = 0; pos < lower.size();) {
    std::size_t len;
    const char32_t cp = DecodeUtf8(lower, pos, &len);
    if (!IsPunctuation(cp)) no_punct.append(lower, pos, len);
    pos += len;
  }
  // Articles are whole word-character runs, as with \b(a|an|the)\b.
  std::string no_articles;
  for (std::size_t pos = 0; pos < no_punct.size();) {
    std::size_t len;
    const char32_t cp = DecodeUtf8(no_punct, pos, &len);
    if (!IsWordChar(cp)) {
      no_articles.append(no_punct, pos, len);
      pos += len;
      continue;
    }
    std::size_t end = pos;
    while (end < no_punct.size()) {
      std::size_t l;
      if (!IsWordChar(DecodeUtf8(no_punct, end, &l))) break;
      end += l;
    }
    const std::string_view word(no_punct.data() + pos, end - pos);
    if (word == "a" || word == "an" || word == "the") {
      no_articles.push_back(' ');
    } else {
      no_articles.append(word);
    }
    pos = end;
  }
  std::string out;
  for (const auto &w : SplitWhitespace(no_articles)) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

int ExactMatch(std::string_view prediction, std::span<const std::string> golds) {
  RequireGolds(golds);
  const std::string p = NormalizeAnswer(prediction);
  return std::any_of(golds.begin(), golds.end(),
                     [&](const std::string &g) { return NormalizeAnswer(g) == p; })
             ? 1
             : 0;
}

double F1Score(std::string_view prediction, std::span<const std::string> golds) {
  RequireGolds(golds);
  const auto pred = SplitWhitespace(NormalizeAnswer(prediction));
  double best = 0.0;
  for (const auto &g : golds) {
    best = std::max(best, F1Single(pred, SplitWhitespace(NormalizeAnswer(g))));
  }
  return best;
}

int SentenceMatch(const AnswerTuple &predicted, const AnswerTuple &gold) {
  return predicted.sentence == gold.sentence ? 1 : 0;
}

int SentenceMatch(const TokenizedDocument &doc, const AnswerTuple &predicted,
                  const AnswerTuple &gold) {
  if (!doc.IsValid(predicted) || !doc.IsValid(gold)) {
    throw InputError("answer tuples do not belong to this document");
  }
  return SentenceMatch(predicted, gold);
}

ExampleScore ScoreExample(const QAExample &example, std::string prediction_text,
                          const AnswerTuple &predicted) {
  ExampleScore s;
  s.id = example.id;
  s.em = ExactMatch(prediction_text, example.gold_answers);
  s.f1 = F1Score(prediction_text, example.gold_answers);
  s.sentence = SentenceMatch(example.document, predicted, example.answer);
  s.prediction_text = std::move(prediction_text);
  return s;
}

ExampleScore ScoreExample(const QAExample &example, const AnswerTuple &predicted) {
  return ScoreExample(example, example.document.SpanText(predicted), predicted);
}

Metrics Aggregate(std::span<const ExampleScore> scores) {
  if (scores.empty()) throw InputError("cannot evaluate an empty dataset");
  Metrics m;
  for (const auto &s : scores) {
    m.exact_match += s.em;
    m.f1 += s.f1;
    m.sentence_accuracy += s.sentence;
  }
  const double n = static_cast<double>(scores.size());
  m.exact_match = 100.0 * m.exact_match / n;
  m.f1 = 100.0 * m.f1 / n;
  m.sentence_accuracy = 100.0 * m.sentence_accuracy / n;
  m.count = scores.size();
  return m;
}

std::string RenderReport(std::span<const ExampleScore> scores,
                         const Metrics &metrics) {
  using json = nlohmann::json;
  std::string out;
  for (const auto &s : scores) {
    json j = {{"id", s.id},
              {"prediction_text", s.prediction_text},
              {"em", s.em},
              {"f1", s.f1},
              {"sentence", s.sentence}};
    out += j.dump() + "\n";
  }
  json agg = {{"exact_match", metrics.exact_match},
              {"f1", metrics.f1},
              {"sentence", metrics.sentence_accuracy},
              {"count", metrics.count}};
  out += agg.dump() + "\n";
  return out;
}

}  // namespace gnr
