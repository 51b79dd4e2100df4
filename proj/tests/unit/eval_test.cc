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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gnr/errors.h"
#include "gnr/eval.h"
#include "support/testing.h"

using namespace gnr;

namespace {
std::vector<std::string> G(std::initializer_list<const char *> xs) {
  return {xs.begin(), xs.end()};
}
}  // namespace

TEST_CASE("normalization") {
  CHECK(NormalizeAnswer("The Beatles!") == "beatles");
  CHECK(NormalizeAnswer("") == "");
  CHECK(NormalizeAnswer("  A  cat,\tan   owl ") == "cat owl");
  CHECK(NormalizeAnswer("theatre") == "theatre");
  CHECK(NormalizeAnswer("¿Qué?") == "qué");
  for (const char *s : {"The Beatles!", "a-b the c", "  x  ", "An apple. THE END", "¿Qué?"}) {
    CHECK(NormalizeAnswer(NormalizeAnswer(s)) == NormalizeAnswer(s));
  }
}

TEST_CASE("exact match") {
  CHECK(ExactMatch("Jeh Johnson", G({"Jeh Johnson"})) == 1);
  CHECK(ExactMatch("Jeh Johnson", G({"the Jeh Johnson"})) == 1);
  CHECK(ExactMatch("Paris", G({"London"})) == 0);
  CHECK(ExactMatch("Paris", G({"London", "paris."})) == 1);
  CHECK_THROWS_AS(ExactMatch("x", {}), InputError);
}

TEST_CASE("f1") {
  CHECK(F1Score("Jeh Johnson", G({"Jeh Johnson"})) == 1.0);
  CHECK(F1Score("Johnson", G({"Jeh Johnson"})) == doctest::Approx(2.0 / 3.0));
  CHECK(F1Score("Paris", G({"London"})) == 0.0);
  CHECK(F1Score("", G({"the"})) == 1.0);
  CHECK(F1Score("", G({"x"})) == 0.0);
  CHECK(F1Score("x b b", G({"b b c"})) == doctest::Approx(2.0 / 3.0));
  CHECK(F1Score("a b b", G({"b b c"})) == doctest::Approx(0.8));
  CHECK_THROWS_AS(F1Score("x", {}), InputError);
}

TEST_CASE("sentence score") {
  CHECK(SentenceMatch({1, 2, 3}, {1, 2, 3}) == 1);
  CHECK(SentenceMatch({1, 0, 0}, {1, 2, 3}) == 1);
  CHECK(SentenceMatch({0, 2, 3}, {1, 2, 3}) == 0);
  const auto doc = MakeDocument("One two. Three four.");
  CHECK_THROWS_AS(SentenceMatch(doc, {5, 0, 0}, {0, 0, 0}), InputError);
}

TEST_CASE("aggregation and report") {
  RngStream rng(31);
  const auto ex = gnr::testing::SyntheticExamples(gnr::testing::DefaultWorld(), 2, rng);
  std::vector<ExampleScore> scores = {ScoreExample(ex[0], ex[0].answer)};
  Metrics m = Aggregate(scores);
  CHECK(m.exact_match == 100.0);
  CHECK(m.f1 == 100.0);
  CHECK(m.sentence_accuracy == 100.0);

  const std::size_t other = ex[1].answer.sentence == 0 ? 1 : 0;
  scores.push_back(ScoreExample(ex[1], "zzz", {other, 0, 0}));
  m = Aggregate(scores);
  CHECK(m.exact_match == 50.0);
  CHECK(m.sentence_accuracy == 50.0);
  CHECK(m.count == 2);
  const std::string report = RenderReport(scores, m);
  CHECK(report == RenderReport(scores, m));
  CHECK(std::count(report.begin(), report.end(), '\n') == 3);
  CHECK(report.find("\"prediction_text\":\"zzz\"") != std::string::npos);
  CHECK_THROWS_AS(Aggregate({}), InputError);
}
