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

#include "gnr/dataset.h"

#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "gnr/unicode.h"

namespace gnr {

using json = nlohmann::json;

AlignedSpan AlignAnswerAtByte(const TokenizedDocument &doc,
                              std::string_view answer_text,
                              std::size_t byte_start) {
  const std::string_view text = doc.text;
  if (byte_start >= text.size()) {
    throw AlignmentError("out-of-bounds",
                         "answer start " + std::to_string(byte_start) +
                             " beyond text of " + std::to_string(text.size()) +
                             " bytes");
  }
  std::size_t pos = byte_start, a = 0, len = 0;
  std::size_t begin = std::string::npos, end = byte_start;
  for (;;) {
    while (a < answer_text.size() && IsSpace(DecodeUtf8(answer_text, a, &len))) a += len;
    if (a >= answer_text.size()) break;
    while (pos < text.size() && IsSpace(DecodeUtf8(text, pos, &len))) pos += len;
    if (pos >= text.size()) {
      throw AlignmentError("text-mismatch", "answer runs past the end of the text");
    }
    std::size_t alen, tlen;
    const char32_t acp = DecodeUtf8(answer_text, a, &alen);
    const char32_t tcp = DecodeUtf8(text, pos, &tlen);
    if (acp != tcp) {
      throw AlignmentError("text-mismatch", "answer '" + std::string(answer_text) +
                                                "' does not match the text at byte " +
                                                std::to_string(byte_start));
    }
    if (begin == std::string::npos) begin = pos;
    a += alen;
    pos += tlen;
    end = pos;
  }
  if (begin == std::string::npos) {
    throw AlignmentError("text-mismatch", "answer text is empty");
  }

  bool found = false;
  AlignedSpan span{{}, begin, end};
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const auto &sentence = doc.sentences[i];
    for (std::size_t j = 0; j < sentence.size(); ++j) {
      const Token &t = sentence[j];
      if (t.end() <= begin || t.offset >= end) continue;
      if (!found) {
        span.tuple = {i, j, j};
        found = true;
      } else if (span.tuple.sentence != i) {
        throw AlignmentError("cross-sentence",
                             "answer spans sentences " +
                                 std::to_string(span.tuple.sentence) + " and " +
                                 std::to_string(i));
      } else {
        span.tuple.end = j;
      }
    }
  }
  if (!found) throw AlignmentError("text-mismatch", "answer covers no token");
  return span;
}

AnswerTuple AlignAnswer(const TokenizedDocument &doc,
                        std::string_view answer_text,
                        std::size_t answer_char_start) {
  std::size_t byte_start;
  try {
    byte_start = CodepointToByteOffset(doc.text, answer_char_start);
  } catch (const InputError &e) {
    throw AlignmentError("out-of-bounds", e.what());
  }
  return AlignAnswerAtByte(doc, answer_text, byte_start).tuple;
}

void CheckExample(const QAExample &example) {
  const auto &doc = example.document;
  const std::string where = "example '" + example.id + "': ";
  std::size_t last_end = 0;
  bool first = true;
  auto check_tokens = [&](const std::vector<Token> &tokens, std::string_view src,
                          const char *what) {
    for (const Token &t : tokens) {
      if (t.text.empty()) throw DataError(where + "empty " + what + " token");
      if (t.end() > src.size() || src.substr(t.offset, t.text.size()) != t.text) {
        throw DataError(where + what + " token '" + t.text +
                        "' disagrees with the source text");
      }
    }
  };
  for (const auto &sentence : doc.sentences) {
    if (sentence.empty()) throw DataError(where + "empty sentence");
    check_tokens(sentence, doc.text, "document");
    for (const Token &t : sentence) {
      if (!first && t.offset < last_end) {
        throw DataError(where + "token offsets are not increasing");
      }
      first = false;
      last_end = t.end();
    }
  }
  if (example.question_tokens.empty()) throw DataError(where + "empty question");
  check_tokens(example.question_tokens, example.question, "question");
  if (!doc.IsValid(example.answer)) {
    throw DataError(where + "gold tuple out of range");
  }
  const AlignedSpan span =
      AlignAnswerAtByte(doc, example.answer_text, example.answer_start);
  if (span.tuple != example.answer) {
    throw DataError(where + "gold tuple does not cover the answer text");
  }
}

QAExample MakeExample(std::string id, std::string title, std::string context,
                      std::string question, std::string answer_text,
                      std::size_t answer_char_start,
                      std::vector<std::string> gold_answers) {
  QAExample ex;
  ex.id = std::move(id);
  ex.title = std::move(title);
  ex.document = MakeDocument(std::move(context));
  if (ex.document.sentences.empty()) throw DataError("empty context");
  ex.question = std::move(question);
  ex.question_tokens = Tokenize(ex.question);
  if (ex.question_tokens.empty()) throw DataError("empty question");
  std::size_t byte_start;
  try {
    byte_start = CodepointToByteOffset(ex.document.text, answer_char_start);
  } catch (const InputError &e) {
    throw AlignmentError("out-of-bounds", e.what());
  }
  ex.answer = AlignAnswerAtByte(ex.document, answer_text, byte_start).tuple;
  ex.answer_start = byte_start;
  ex.answer_text = std::move(answer_text);
  ex.gold_answers = std::move(gold_answers);
  if (ex.gold_answers.empty()) ex.gold_answers.push_back(ex.answer_text);
  CheckExample(ex);
  return ex;
}

std::size_t IngestionReport::total_dropped() const {
  std::size_t n = 0;
  for (const auto &[reason, count] : dropped) n += count;
  return n;
}

std::string IngestionReport::ToJson() const {
  json j;
  j["questions"] = questions;
  j["loaded"] = loaded;
  j["dropped"] = json::object();
  for (const auto &[reason, count] : dropped) j["dropped"][reason] = count;
  return j.dump();
}

LoadedDataset ParseSquad(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed SQuAD JSON: ") + e.what());
  }
  LoadedDataset out;
  try {
    for (const auto &article : root.at("data")) {
      const std::string title = article.value("title", "");
      for (const auto &paragraph : article.at("paragraphs")) {
        const std::string context = paragraph.at("context").get<std::string>();
        for (const auto &qa : paragraph.at("qas")) {
          ++out.report.questions;
          const auto &answers = qa.at("answers");
          if (answers.empty()) {
            ++out.report.dropped["no-answer"];
            continue;
          }
          std::vector<std::string> golds;
          for (const auto &a : answers) golds.push_back(a.at("text").get<std::string>());
          try {
            out.examples.push_back(MakeExample(
                qa.at("id").get<std::string>(), title, context,
                qa.at("question").get<std::string>(), golds.front(),
                answers.front().at("answer_start").get<std::size_t>(), golds));
            ++out.report.loaded;
          } catch (const AlignmentError &e) {
            ++out.report.dropped[e.reason()];
          } catch (const DataError &e) {
            const std::string what = e.what();
            if (what == "empty context") {
              ++out.report.dropped["empty-context"];
            } else if (what == "empty question") {
              ++out.report.dropped["empty-question"];
            } else {
              ++out.report.dropped["invariant"];
            }
          }
        }
      }
    }
  } catch (const json::exception &e) {
    throw DataError(std::string("SQuAD JSON does not match the v1.1 schema: ") +
                    e.what());
  }
  return out;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

LoadedDataset LoadSquad(const std::string &path) {
  return ParseSquad(ReadFile(path));
}

std::string ToSquadJson(const std::vector<QAExample> &examples) {
  json data = json::array();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const QAExample &ex = examples[i];
    json qa;
    qa["id"] = ex.id;
    qa["question"] = ex.question;
    qa["answers"] = json::array();
    qa["answers"].push_back(
        {{"text", ex.answer_text},
         {"answer_start", ByteToCodepointOffset(ex.document.text, ex.answer_start)}});
    for (std::size_t g = 1; g < ex.gold_answers.size(); ++g) {
      // Extra golds keep evaluation max-over-gold; their offsets are unknown,
      // so they reuse the first answer's start.
      qa["answers"].push_back(
          {{"text", ex.gold_answers[g]},
           {"answer_start", ByteToCodepointOffset(ex.document.text, ex.answer_start)}});
    }
    const bool same_paragraph =
        i > 0 && examples[i - 1].title == ex.title &&
        examples[i - 1].document.text == ex.document.text;
    if (same_paragraph) {
      data.back()["paragraphs"].back()["qas"].push_back(std::move(qa));
      continue;
    }
    json paragraph = {{"context", ex.document.text}, {"qas", json::array({qa})}};
    if (i > 0 && examples[i - 1].title == ex.title) {
      data.back()["paragraphs"].push_back(std::move(paragraph));
    } else {
      data.push_back({{"title", ex.title}, {"paragraphs", json::array({paragraph})}});
    }
  }
  json root = {{"version", "1.1"}, {"data", std::move(data)}};
  return root.dump();
}

void WriteSquad(const std::string &path, const std::vector<QAExample> &examples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << ToSquadJson(examples) << '\n';
}

std::string ToCacheLine(const QAExample &ex) {
  json sentences = json::array();
  for (const auto &sentence : ex.document.sentences) {
    json s = json::array();
    for (const Token &t : sentence) s.push_back({t.text, t.offset});
    sentences.push_back(std::move(s));
  }
  json question_tokens = json::array();
  for (const Token &t : ex.question_tokens) question_tokens.push_back({t.text, t.offset});
  json j = {
      {"id", ex.id},
      {"title", ex.title},
      {"context", ex.document.text},
      {"sentences", std::move(sentences)},
      {"question", ex.question},
      {"question_tokens", std::move(question_tokens)},
      {"answer_text", ex.answer_text},
      {"answer_start", ex.answer_start},
      {"gold_answers", ex.gold_answers},
      {"answer", {ex.answer.sentence, ex.answer.start, ex.answer.end}},
  };
  return j.dump();
}

QAExample FromCacheLine(std::string_view line) {
  QAExample ex;
  try {
    const json j = json::parse(line);
    ex.id = j.at("id").get<std::string>();
    ex.title = j.at("title").get<std::string>();
    ex.document.text = j.at("context").get<std::string>();
    for (const auto &s : j.at("sentences")) {
      std::vector<Token> sentence;
      for (const auto &t : s) sentence.push_back({t.at(0).get<std::string>(), t.at(1).get<std::size_t>()});
      ex.document.sentences.push_back(std::move(sentence));
    }
    ex.question = j.at("question").get<std::string>();
    for (const auto &t : j.at("question_tokens")) {
      ex.question_tokens.push_back({t.at(0).get<std::string>(), t.at(1).get<std::size_t>()});
    }
    ex.answer_text = j.at("answer_text").get<std::string>();
    ex.answer_start = j.at("answer_start").get<std::size_t>();
    ex.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
    const auto &a = j.at("answer");
    ex.answer = {a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>(),
                 a.at(2).get<std::size_t>()};
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed cache line: ") + e.what());
  }
  CheckExample(ex);
  return ex;
}

void WriteCache(const std::string &path, const std::vector<QAExample> &examples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto &ex : examples) out << ToCacheLine(ex) << '\n';
}

std::vector<QAExample> ReadCache(const std::string &path) {
  std::istringstream in(ReadFile(path));
  std::vector<QAExample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(FromCacheLine(line));
  }
  return out;
}

}  // namespace gnr
