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

#include <cmath>
#include <set>
#include <sstream>

#include "gnr/errors.h"
#include "gnr/typeswaps.h"
#include "support/testing.h"

using namespace gnr;

namespace {

TypeInventory Inv(const std::string &text, std::vector<std::string> *warnings = nullptr) {
  std::istringstream in(text);
  return TypeInventory::Parse(in, warnings);
}

std::optional<NumberKind> Kind(const std::string &text) {
  const auto tokens = Tokenize(text);
  return AssignNumberType(std::span<const Token>(tokens));
}

const char *kSecretaries =
    "Sheryl Sandberg\thuman\nJeh Johnson\thuman\nBarack Obama\thuman\n"
    "New York\tcity\nNew York City\tcity\nParis\tcity\n";

}  // namespace

TEST_CASE("inventory files") {
  std::vector<std::string> warnings;
  const auto inv = Inv("# comment\nParis\tcity\nLyon\tcity\n\nParis\tperson\nLyon\tcity\n",
                       &warnings);
  CHECK(inv.Types() == std::vector<std::string>{"city"});
  CHECK(inv.Surfaces("city").size() == 2);
  CHECK(*inv.TypeOf("Paris") == "city");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("line 5") != std::string::npos);
  const auto stats = inv.Stats();
  CHECK(stats.types == 1);
  CHECK(stats.variants == 2);
  CHECK(stats.average_variants == 2.0);
  try {
    Inv("Paris\tcity\nno tab here\n");
    FAIL("expected a data error");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(Inv("\tcity\n"), DataError);
  CHECK_THROWS_AS(Inv("a\tb\tc\n"), DataError);
}

TEST_CASE("number types") {
  CHECK(Kind("2012") == NumberKind::kYear);
  CHECK(Kind("3012") == NumberKind::kInteger);
  CHECK(Kind("999") == NumberKind::kInteger);
  CHECK(Kind("12,500") == NumberKind::kInteger);
  CHECK(Kind("3.25") == NumberKind::kDecimal);
  CHECK(Kind("Tuesday") == NumberKind::kWeekday);
  CHECK(Kind("December") == NumberKind::kMonth);
  CHECK(Kind("third") == NumberKind::kOrdinal);
  CHECK(Kind("21st") == NumberKind::kOrdinal);
  CHECK(Kind("40 km") == NumberKind::kQuantity);
  CHECK(AssignNumberType("40 km") == NumberKind::kQuantity);
  CHECK_FALSE(Kind("cat").has_value());
  CHECK_FALSE(Kind("12,34").has_value());
  CHECK_FALSE(Kind("cat km").has_value());
}

TEST_CASE("number samplers keep the kind and change the value") {
  RngStream rng(41);
  for (int i = 0; i < 200; ++i) {
    const std::string y = SampleNumber("2012", NumberKind::kYear, rng);
    CHECK(y != "2012");
    CHECK(std::stoi(y) >= 1000);
    CHECK(std::stoi(y) <= 2999);
    const std::string n = SampleNumber("12,500", NumberKind::kInteger, rng);
    CHECK(n.size() == 6);
    CHECK(n[2] == ',');
    CHECK(n != "12,500");
    const std::string d = SampleNumber("3.25", NumberKind::kDecimal, rng);
    CHECK(d.size() == 4);
    CHECK(AssignNumberType(d) == NumberKind::kDecimal);
    CHECK(SampleNumber("7", NumberKind::kInteger, rng) != "7");
    const std::string w = SampleNumber("Tuesday", NumberKind::kWeekday, rng);
    CHECK(AssignNumberType(w) == NumberKind::kWeekday);
    CHECK(w != "Tuesday");
    const std::string o = SampleNumber("Third", NumberKind::kOrdinal, rng);
    CHECK(o != "Third");
    CHECK(std::isupper(static_cast<unsigned char>(o[0])));
    const std::string on = SampleNumber("21st", NumberKind::kOrdinal, rng);
    CHECK(AssignNumberType(on) == NumberKind::kOrdinal);
    const std::string q = SampleNumber("40 km", NumberKind::kQuantity, rng);
    CHECK(q.substr(q.size() - 3) == " km");
    CHECK(q != "40 km");
  }
}

TEST_CASE("extraction prefers the longest surface") {
  const auto inv = Inv(kSecretaries);
  const std::string context =
      "Jeh Johnson flew to New York City in December 2012. He met Sheryl Sandberg there.";
  const auto ex = MakeExample("e", "t", context, "Who did Jeh Johnson meet?",
                              "Sheryl Sandberg", context.find("Sheryl"));
  const auto occ = ExtractEntities(ex, inv);
  std::vector<std::string> surfaces;
  for (const auto &o : occ) surfaces.push_back(o.surface);
  CHECK(surfaces == std::vector<std::string>{"Jeh Johnson", "New York City", "December",
                                             "2012", "Sheryl Sandberg", "Jeh Johnson"});
  CHECK(occ[0].type == "human");
  CHECK(occ[3].type == "number/year");
  CHECK(occ.back().in_question);

  const auto numbers_only = ExtractEntities(ex, TypeInventory{});
  for (const auto &o : numbers_only) CHECK(o.number.has_value());
  CHECK(numbers_only.size() == 2);
}

TEST_CASE("swaps rewrite every occurrence consistently") {
  const auto inv = Inv(kSecretaries);
  const std::string context =
      "Sheryl Sandberg spoke briefly. Later Sheryl Sandberg thanked the crowd.";
  const auto ex = MakeExample("e", "t", context, "Who spoke briefly?", "Sheryl Sandberg", 0);
  RngStream rng(42);
  const auto out = GenerateSwap(ex, inv, rng);
  REQUIRE(out.example.has_value());
  const auto &swapped = *out.example;
  const std::string repl = out.plan.replacements.at("Sheryl Sandberg");
  CHECK(repl != "Sheryl Sandberg");
  CHECK(*inv.TypeOf(repl) == "human");
  CHECK(swapped.answer_text == repl);
  CHECK(swapped.document.text == repl + " spoke briefly. Later " + repl + " thanked the crowd.");
  CHECK(swapped.document.SpanText(swapped.answer) == repl);
  CHECK(swapped.question == ex.question);
}

TEST_CASE("rejections") {
  const auto inv = Inv(kSecretaries);
  RngStream rng(43);
  const auto plain = MakeExample("e", "t", "Nothing to see here.", "What?", "Nothing", 0);
  CHECK(GenerateSwap(plain, inv, rng).rejection == "no-entities");
  const auto single = MakeExample("e", "t", "Zed lives here.", "Who?", "Zed", 0);
  CHECK(GenerateSwap(single, Inv("Zed\tx\n"), rng).rejection == "no-replacement");
  // The entity sits outside both the question and the answer.
  const auto untouched =
      MakeExample("e", "t", "Paris is big. Rome is old.", "What is old?", "Rome", 14);
  CHECK(GenerateSwap(untouched, inv, rng).rejection == "no-mutation");
  // The answer covers half of an entity.
  const auto partial = MakeExample("e", "t", "He saw Jeh Johnson.", "Who?", "Johnson", 11);
  CHECK(GenerateSwap(partial, inv, rng).rejection == "answer-boundary");
}

TEST_CASE("document counts match enumeration") {
  const auto inv = Inv(kSecretaries);
  const auto ex = MakeExample("e", "t", "Jeh Johnson met Barack Obama in Paris.",
                              "Who met Barack Obama?", "Jeh Johnson", 0);
  const auto occ = ExtractEntities(ex, inv);
  // human has 3 variants (two surfaces), city has 3 (one surface).
  CHECK(LogDocumentCount(occ, inv) == doctest::Approx(std::log(27.0)));
  std::set<std::string> docs;
  for (const auto &a : inv.Surfaces("human")) {
    for (const auto &b : inv.Surfaces("human")) {
      for (const auto &c : inv.Surfaces("city")) {
        SwapPlan plan;
        plan.replacements = {{"Jeh Johnson", a}, {"Barack Obama", b}, {"Paris", c}};
        docs.insert(ApplyPlan(ex, occ, plan).context);
      }
    }
  }
  CHECK(docs.size() == 27);
}

TEST_CASE("sampling augmented data") {
  const auto world = gnr::testing::DefaultWorld();
  const auto inv = Inv(gnr::testing::KbText(world));
  RngStream rng(44);
  const auto data = gnr::testing::SyntheticExamples(world, 30, rng);
  CHECK(SampleAugmented(data, inv, 0, rng).empty());
  AugmentReport report;
  const auto out = SampleAugmented(data, inv, 50, rng, {}, &report);
  CHECK(out.size() == 50);
  CHECK(report.accepted == 50);
  std::set<std::string> ids;
  for (const auto &e : out) ids.insert(e.id);
  CHECK(ids.size() == 50);

  const auto plain = MakeExample("e", "t", "Nothing to see here.", "What?", "Nothing", 0);
  std::vector<QAExample> hopeless = {plain};
  AugmentOptions opts;
  opts.failure_budget = 20;
  CHECK_THROWS_AS(SampleAugmented(hopeless, inv, 1, rng, opts), DataError);
}
