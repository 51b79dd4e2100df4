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

// Helpers shared by the unit and acceptance tests.

#ifndef GNR_TESTS_SUPPORT_TESTING_H_
#define GNR_TESTS_SUPPORT_TESTING_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "gnr/dataset.h"
#include "gnr/embeddings.h"
#include "gnr/nn.h"
#include "gnr/search.h"
#include "gnr/tensor.h"
#include "gnr/typeswaps.h"

namespace gnr::testing {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
};

// |a - b| / max(|a|, |b|, floor). The floor keeps gradients that are zero
// up to roundoff from dominating.
inline double RelativeError(double a, double b, double floor = 1e-5) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Compares analytic gradients of `loss` with central differences on every
// element of every parameter.
inline GradCheckResult GradCheck(const std::function<Tensor()> &loss,
                                 std::vector<Tensor> params, double eps = 1e-5) {
  for (auto &p : params) p.ZeroGrad();
  loss().Backward();
  std::vector<std::vector<double>> analytic;
  for (const auto &p : params) analytic.emplace_back(p.grad().begin(), p.grad().end());
  GradCheckResult r;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto values = params[t].mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = loss().item();
      values[i] = saved - eps;
      const double down = loss().item();
      values[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      r.max_relative_error =
          std::max(r.max_relative_error, RelativeError(analytic[t][i], numeric));
      ++r.checked;
    }
  }
  return r;
}

inline std::vector<double> RandomValues(std::size_t n, RngStream &rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto &x : v) x = scale * rng.Normal();
  return v;
}

// Random stage scores for up to `max_sentences` sentences of up to
// `max_words` words.
inline FixedScorer RandomScorer(RngStream &rng, std::size_t max_sentences = 3,
                                std::size_t max_words = 5, double scale = 2.0) {
  const std::size_t n = 1 + rng.UniformInt(max_sentences);
  std::vector<double> sentences = RandomValues(n, rng, scale);
  std::vector<std::vector<double>> starts;
  std::vector<std::vector<std::vector<double>>> ends;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = 1 + rng.UniformInt(max_words);
    starts.push_back(RandomValues(m, rng, scale));
    ends.emplace_back();
    for (std::size_t j = 0; j < m; ++j) ends.back().push_back(RandomValues(m - j, rng, scale));
  }
  return FixedScorer::FromValues(sentences, starts, ends);
}

// Small closed world of people and facts about them.
struct World {
  std::vector<std::string> people;
  std::vector<std::string> cities;
  std::vector<std::string> jobs;
  std::vector<std::string> foods;
};

inline World DefaultWorld() {
  return {{"Alice", "Bruno", "Chen", "Dana", "Emil", "Farah", "Goran", "Hana", "Ivan", "Jun",
           "Kemal", "Lena", "Milo", "Nadia", "Oskar", "Priya", "Quinn", "Rosa", "Sven",
           "Tomas"},
          {"Paris", "Lyon", "Oslo", "Quito", "Lima", "Hanoi", "Dakar", "Perth", "Riga",
           "Turin", "Porto", "Cork", "Kyoto", "Accra", "Bern"},
          {"baker", "pilot", "nurse", "judge", "farmer", "tailor", "miner", "chemist",
           "sailor", "painter"},
          {"rice", "bread", "soup", "cheese", "olives", "mangoes", "noodles", "beans",
           "plums", "dates"}};
}

inline std::vector<std::string> FunctionWords() {
  return {"lives", "in", "works", "as", "a", "likes", "eating", "Where", "does", "live",
          "What", "work", "like", "eat", "to", "?", "."};
}

inline std::vector<std::string> Vocabulary(const World &w) {
  std::vector<std::string> out = FunctionWords();
  for (const auto *list : {&w.people, &w.cities, &w.jobs, &w.foods}) {
    out.insert(out.end(), list->begin(), list->end());
  }
  return out;
}

inline WordVectorTable RandomTable(const std::vector<std::string> &words, std::size_t dim,
                                   std::uint64_t seed) {
  WordVectorTable table(dim);
  RngStream rng(seed);
  for (const auto &w : words) table.Add(w, RandomValues(dim, rng, 1.0));
  return table;
}

inline std::string KbText(const World &w) {
  std::string out = "# toy inventory\n";
  for (const auto &p : w.people) out += p + "\tperson\n";
  for (const auto &c : w.cities) out += c + "\tcity\n";
  for (const auto &j : w.jobs) out += j + "\tjob\n";
  for (const auto &f : w.foods) out += f + "\tfood\n";
  return out;
}

template <typename T>
const T &Pick(const std::vector<T> &v, RngStream &rng) {
  return v[rng.UniformInt(v.size())];
}

// Documents of two or three sentences, each stating one fact about a
// distinct person; the question asks for one of those facts.
inline std::vector<QAExample> SyntheticExamples(const World &w, std::size_t count,
                                                RngStream &rng,
                                                const std::string &prefix = "ex") {
  std::vector<QAExample> out;
  while (out.size() < count) {
    const std::size_t n = 2 + rng.UniformInt(2);
    std::vector<std::string> people;
    while (people.size() < n) {
      const std::string &p = Pick(w.people, rng);
      if (std::find(people.begin(), people.end(), p) == people.end()) people.push_back(p);
    }
    std::string context;
    std::vector<std::pair<std::string, std::string>> facts;  // (question, answer)
    std::vector<std::size_t> answer_starts;
    for (const auto &p : people) {
      if (!context.empty()) context += " ";
      std::string answer;
      std::string question;
      std::string sentence;
      std::size_t offset = 0;
      switch (rng.UniformInt(3)) {
        case 0:
          answer = Pick(w.cities, rng);
          sentence = p + " lives in ";
          question = "Where does " + p + " live ?";
          break;
        case 1:
          answer = Pick(w.jobs, rng);
          sentence = p + " works as a ";
          question = "What does " + p + " work as ?";
          break;
        default:
          answer = Pick(w.foods, rng);
          sentence = p + " likes eating ";
          question = "What does " + p + " like to eat ?";
          break;
      }
      offset = context.size() + sentence.size();
      context += sentence + answer + " .";
      facts.emplace_back(question, answer);
      answer_starts.push_back(offset);
    }
    const std::size_t q = rng.UniformInt(n);
    out.push_back(MakeExample(prefix + std::to_string(out.size()), "synthetic", context,
                              facts[q].first, facts[q].second, answer_starts[q]));
  }
  return out;
}

}  // namespace gnr::testing

#endif  // GNR_TESTS_SUPPORT_TESTING_H_
