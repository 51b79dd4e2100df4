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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gnr/dataset.h"
#include "gnr/eval.h"
#include "gnr/model.h"
#include "gnr/pipeline.h"
#include "gnr/search.h"
#include "gnr/typeswaps.h"
#include "support/testing.h"

using namespace gnr;
using namespace gnr::testing;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Collects failure notes for one criterion.
class Criterion {
 public:
  void Expect(bool ok, const std::string &what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    ok_ = ok_ && ok;
  }
  bool ok() const { return ok_; }
  std::string Notes() const {
    std::string out;
    for (const auto &f : failures_) out += (out.empty() ? "" : "; ") + f;
    return out;
  }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
};

std::string Fmt(const char *format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

// Fixed, non-uniform weights so no gradient component cancels by symmetry.
Tensor FlatReadout(const Tensor &t) {
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(0.3 + 1.1 * i);
  return Sum(Mul(Tensor::Constant(t.shape(), w), t));
}

Tensor Param(Shape shape, RngStream &rng) {
  const std::size_t n = NumElements(shape);
  return Tensor::Parameter(std::move(shape), RandomValues(n, rng));
}

// 1. Primitive and full-model gradients.
Criterion GradientSuite(std::string &detail) {
  Criterion c;
  const auto start = Clock::now();
  RngStream rng(101);
  Tensor w = Param({3, 4}, rng), x = Param({4}, rng), y = Param({4}, rng),
         b = Param({3}, rng), m = Param({4, 2}, rng);
  struct Case {
    const char *name;
    std::function<Tensor()> f;
    std::vector<Tensor> params;
  };
  ParameterStore store;
  LstmParams lstm = LstmParams::Create(store, "l", 4, 3, rng);
  MlpParams mlp = MlpParams::Create(store, "m", 4, 3, 2, rng);
  Tensor h0 = Param({3}, rng), c0 = Param({3}, rng);
  std::vector<Case> cases = {
      {"matmul", [&] { return FlatReadout(MatMul(w, m)); }, {w, m}},
      {"affine", [&] { return FlatReadout(Affine(w, x, b)); }, {w, x, b}},
      {"add", [&] { return FlatReadout(Add(x, y)); }, {x, y}},
      {"sub", [&] { return FlatReadout(Sub(x, y)); }, {x, y}},
      {"mul", [&] { return FlatReadout(Mul(x, y)); }, {x, y}},
      {"scale", [&] { return FlatReadout(Scale(x, 0.7)); }, {x}},
      {"mask", [&] { return FlatReadout(MaskMul(x, {0, 2, 1, 0.5})); }, {x}},
      {"sigmoid", [&] { return FlatReadout(Sigmoid(x)); }, {x}},
      {"tanh", [&] { return FlatReadout(Tanh(x)); }, {x}},
      {"relu", [&] { return FlatReadout(Relu(x)); }, {x}},
      {"concat", [&] { return FlatReadout(Concat({x, b})); }, {x, b}},
      {"slice", [&] { return FlatReadout(Slice(x, 1, 2)); }, {x}},
      {"pick", [&] { return Mul(Pick(x, 2), Pick(y, 0)); }, {x, y}},
      {"sum", [&] { return Mul(Sum(x), Sum(y)); }, {x, y}},
      {"dot", [&] { return Dot(x, y); }, {x, y}},
      {"weighted-sum",
       [&] {
         std::vector<Tensor> vs = {x, y, Tanh(y)};
         return FlatReadout(WeightedSum(Slice(b, 0, 3), vs));
       },
       {b, x, y}},
      {"softmax", [&] { return FlatReadout(Softmax(x)); }, {x}},
      {"log-sum-exp", [&] { return LogSumExp(x); }, {x}},
      {"lstm-step",
       [&] {
         const auto s = LstmStep(x, {h0, c0}, lstm);
         return Add(FlatReadout(s.h), FlatReadout(s.c));
       },
       {x, h0, c0, lstm.input_weight, lstm.recurrent_weight, lstm.bias}},
      {"mlp", [&] { return FlatReadout(Mlp2(x, mlp)); },
       {x, mlp.hidden.weight, mlp.hidden.bias, mlp.output.weight, mlp.output.bias}},
  };
  double worst = 0.0;
  for (auto &k : cases) {
    const auto r = GradCheck(k.f, k.params);
    worst = std::max(worst, r.max_relative_error);
    c.Expect(r.max_relative_error <= 1e-4,
             std::string(k.name) + " " + Fmt("%.3g", r.max_relative_error));
  }

  // Two sentences of four tokens, hidden 4, dim 5.
  GnrModel model({2, 4, 5, 1}, 2);
  const auto table = RandomTable(
      {"Anna", "sees", "dogs", ".", "Bob", "eats", "figs", "What", "does", "eat", "?"}, 5, 3);
  const auto ex = MakeExample("toy", "t", "Anna sees dogs. Bob eats figs.",
                              "What does Bob eat?", "figs", 25);
  c.Expect(ex.document.num_sentences() == 2 && ex.document.sentences[0].size() == 4 &&
               ex.document.sentences[1].size() == 4,
           "toy document shape");
  std::vector<Tensor> params;
  for (auto &e : model.store().entries()) params.push_back(e.tensor);
  for (std::size_t width : {std::size_t{2}, std::size_t{64}}) {
    const auto r = GradCheck(
        [&] {
          auto scorer = BuildScorer(model, ex.document, ex.question_tokens, table, {});
          return SearchLoss(*scorer, ex.answer, width, Normalization::kGlobal).loss;
        },
        params);
    worst = std::max(worst, r.max_relative_error);
    c.Expect(r.checked == model.store().NumScalars(), "not every parameter checked");
    c.Expect(r.max_relative_error <= 1e-4,
             "full loss B=" + std::to_string(width) + " " + Fmt("%.3g", r.max_relative_error));
  }
  const double secs = Seconds(start);
  c.Expect(secs < 60.0, "took " + Fmt("%.1f", secs) + " s");
  detail = "max rel err " + Fmt("%.2e", worst) + ", " + Fmt("%.1f", secs) + " s";
  return c;
}

std::vector<FixedScorer> ToyScorers(std::size_t count, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<FixedScorer> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(RandomScorer(rng, 3, 5));
  return out;
}

double RelDiff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// 2. Exhaustive beams reproduce exact partition and argmax.
Criterion PartitionOracle(std::string &detail) {
  Criterion c;
  double worst = 0.0;
  for (auto &s : ToyScorers(200, 202)) {
    const auto all = EnumerateAnswers(s);
    // Brute force, independent of the library's log-sum-exp.
    double hi = -INFINITY;
    for (const auto &[a, v] : all) hi = std::max(hi, v);
    double z = 0.0;
    AnswerTuple best = all.front().first;
    double best_score = -INFINITY;
    for (const auto &[a, v] : all) {
      z += std::exp(v - hi);
      if (v > best_score) best_score = v, best = a;
    }
    const double log_z = hi + std::log(z);
    const Beam beam = BeamDecode(s, all.size());
    const double beam_z = BeamLogPartition(s, beam).item();
    worst = std::max(worst, RelDiff(beam_z, log_z));
    c.Expect(RelDiff(beam_z, log_z) <= 1e-9, "log Z " + Fmt("%.17g", beam_z));
    c.Expect(beam.size() == all.size(), "beam not exhaustive");
    c.Expect(beam.top().tuple == best, "argmax differs");
  }
  detail = "200 documents, max rel diff " + Fmt("%.2e", worst);
  return c;
}

// 3. Local normalization and the global re-ranking fixture.
Criterion NormalizationSemantics(std::string &detail) {
  Criterion c;
  double worst = 0.0;
  for (auto &s : ToyScorers(200, 202)) {
    double total = 0.0;
    for (const auto &[a, v] : EnumerateAnswers(s)) {
      total += std::exp(LocalLogProb(s, a).item());
      const auto path = LocalPathProbabilities(s, a);
      c.Expect(path[0] <= 1.0 && path[1] <= path[0] && path[2] <= path[1],
               "local path probability grew");
    }
    worst = std::max(worst, std::abs(total - 1.0));
    c.Expect(std::abs(total - 1.0) <= 1e-9, "local sum " + Fmt("%.17g", total));
  }
  // Sentence 0 is picked with probability 0.49 but its only answer ends up
  // with 0.64 once the start score is added.
  const double x = std::log((0.64 * 0.51) / (0.36 * 0.49));
  FixedScorer s = FixedScorer::FromValues({std::log(0.49), std::log(0.51)}, {{x}, {0.0}},
                                          {{{0.0}}, {{0.0}}});
  const SearchTrace trace = RunBeamSearch(s, 2);
  const auto sentence_probs = BeamProbabilities(trace.beams[0]);
  double p_sentence = 0.0;
  for (std::size_t i = 0; i < trace.beams[0].size(); ++i) {
    if (trace.beams[0].candidates()[i].tuple.sentence == 0) p_sentence = sentence_probs[i];
  }
  const auto final_probs = BeamProbabilities(trace.final_beam());
  const double p_final = final_probs[0];
  c.Expect(trace.final_beam().top().tuple == AnswerTuple{0, 0, 0}, "top answer");
  c.Expect(std::abs(p_sentence - 0.49) <= 1e-12, "sentence stage " + Fmt("%.15g", p_sentence));
  c.Expect(std::abs(p_final - 0.64) <= 1e-12, "final " + Fmt("%.15g", p_final));
  c.Expect(p_final > p_sentence, "no re-ranking");
  detail = "max |sum-1| " + Fmt("%.1e", worst) + ", fixture " + Fmt("%.2f", p_sentence) +
           " -> " + Fmt("%.2f", p_final);
  return c;
}

bool AllZero(const Tensor &t) {
  for (double g : t.grad()) {
    if (g != 0.0) return false;
  }
  return true;
}

// 4. Early updates at the sentence stage.
Criterion EarlyUpdate(std::string &detail) {
  Criterion c;
  // Hand-set stage scores: sentences [3, 2, 0], gold in sentence 2, B = 2.
  Tensor sent = Tensor::Parameter({3}, {3.0, 2.0, 0.0});
  std::vector<Tensor> starts = {Tensor::Parameter({1}, {0.5}), Tensor::Parameter({1}, {0.1}),
                                Tensor::Parameter({2}, {0.2, 0.3})};
  std::vector<std::vector<Tensor>> ends = {
      {Tensor::Parameter({1}, {0.0})},
      {Tensor::Parameter({1}, {0.0})},
      {Tensor::Parameter({2}, {1.0, 2.0}), Tensor::Parameter({1}, {4.0})}};
  FixedScorer fixed(sent, starts, ends);
  const LossResult r = SearchLoss(fixed, {2, 1, 1}, 2, Normalization::kGlobal);
  const double expected = std::log(std::exp(3.0) + std::exp(2.0) + std::exp(0.0)) - 0.0;
  c.Expect(r.early_update == Stage::kSentenceChosen, "fixture: no early update");
  c.Expect(std::abs(r.loss.item() - expected) <= 1e-10,
           "fixture loss " + Fmt("%.17g", r.loss.item()));
  r.loss.Backward();
  for (const auto &t : starts) c.Expect(AllZero(t), "fixture start gradient");
  for (const auto &row : ends) {
    for (const auto &t : row) c.Expect(AllZero(t), "fixture end gradient");
  }
  c.Expect(fixed.end_scorer_calls() == 0, "fixture computed end scores");

  // Full model through train_step. Zeroing the sentence scorer makes every
  // sentence score 0; with B = 1 the tie goes to sentence 0, the gold
  // sentence 1 is pruned, and the partial objective is log(e^0 + e^0) - 0.
  GnrModel model({1, 6, 5, 1}, 9);
  const auto table = RandomTable(
      {"Anna", "sees", "dogs", ".", "Bob", "eats", "figs", "What", "does", "eat", "?"}, 5, 3);
  const auto ex = MakeExample("toy", "t", "Anna sees dogs. Bob eats figs.",
                              "What does Bob eat?", "figs", 25);
  for (auto &e : model.store().entries()) {
    if (e.name.rfind("score/sentence", 0) == 0) {
      auto v = e.tensor.mutable_values();
      std::fill(v.begin(), v.end(), 0.0);
    }
  }
  model.store().ZeroGrad();
  TrainOptions opts;
  opts.beam_width = 1;
  RngStream rng(4);
  const auto step = TrainStep(ex, model, table, opts, rng);
  const double hand = std::log(2.0);
  c.Expect(step.early_update == Stage::kSentenceChosen, "train_step: no early update");
  c.Expect(std::abs(step.loss - hand) <= 1e-10, "train_step loss " + Fmt("%.17g", step.loss));
  c.Expect(step.end_scorer_calls == 0, "train_step computed end scores");
  std::size_t zero_tensors = 0;
  bool sentence_moved = false;
  for (const auto &e : model.store().entries()) {
    if (e.name.rfind("score/start", 0) == 0 || e.name.rfind("score/end", 0) == 0) {
      c.Expect(AllZero(e.tensor), "gradient reached " + e.name);
      ++zero_tensors;
    }
    if (e.name.rfind("score/sentence", 0) == 0 && !AllZero(e.tensor)) sentence_moved = true;
  }
  c.Expect(zero_tensors > 0, "no start/end parameters found");
  c.Expect(sentence_moved, "sentence scorer received no gradient");
  detail = "fixture loss " + Fmt("%.12f", r.loss.item()) + ", train_step loss " +
           Fmt("%.12f", step.loss) + " (ln 2), " + std::to_string(zero_tensors) +
           " start/end tensors with zero gradient";
  return c;
}

// 5. End scores only for starts on the beam.
Criterion ConditionalComputation(std::string &detail) {
  Criterion c;
  std::size_t decodes = 0;
  std::size_t max_ratio_violations = 0;
  RngStream rng(505);
  for (std::size_t trial = 0; trial < 200; ++trial) {
    FixedScorer base = RandomScorer(rng, 3, 8);
    for (std::size_t b : {1, 2, 3, 5, 8, 32}) {
      FixedScorer s = base;
      BeamDecode(s, b);
      ++decodes;
      if (s.end_scorer_calls() > b) ++max_ratio_violations;
      FixedScorer t = base;
      const auto answers = EnumerateAnswers(t);
      FixedScorer u = base;
      SearchLoss(u, answers[trial % answers.size()].first, b, Normalization::kGlobal);
      ++decodes;
      if (u.end_scorer_calls() > b) ++max_ratio_violations;
    }
  }
  GnrModel model({1, 4, 5, 1}, 5);
  const auto table = RandomTable(
      {"Anna", "sees", "dogs", ".", "Bob", "eats", "figs", "What", "does", "eat", "?"}, 5, 3);
  const auto doc = MakeDocument("Anna sees dogs. Bob eats figs. Anna eats dogs and figs.");
  const auto q = Tokenize("What does Bob eat?");
  for (std::size_t b : {1, 2, 4, 32}) {
    const auto p = Predict(doc, q, model, table, b);
    ++decodes;
    if (p.end_scorer_calls > b) ++max_ratio_violations;
  }
  c.Expect(max_ratio_violations == 0, std::to_string(max_ratio_violations) + " decodes over B");
  detail = std::to_string(decodes) + " decodes, none above B";
  return c;
}

// 6. Overfitting a small synthetic set.
Criterion Overfit(std::string &detail) {
  Criterion c;
  const auto start = Clock::now();
  const World world = DefaultWorld();
  const auto vocab = Vocabulary(world);
  const auto table = RandomTable(vocab, 16, 11);
  RngStream rng(12);
  const auto data = SyntheticExamples(world, 50, rng);
  struct Run {
    Normalization mode;
    std::size_t width;
    const char *name;
  };
  for (const Run run : {Run{Normalization::kLocal, 1, "local B=1"},
                        Run{Normalization::kGlobal, 32, "global B=32"},
                        Run{Normalization::kGlobal, 2, "global B=2"}}) {
    RunConfig config;
    config.depth = 1;
    config.hidden = 16;
    config.embed_dim = 16;
    config.recurrent_dropout = 0.0;
    config.fc_dropout = 0.0;
    config.weight_noise = 0.0;
    config.learning_rate = 0.01;
    config.batch_size = 4;
    config.beam_width = run.width;
    config.normalization = run.mode;
    config.augment_count = 0;
    config.max_epochs = 200;
    config.patience = 200;
    config.seed = 3;
    GnrModel model(config.dims(), config.seed);
    std::ostringstream log;
    const auto summary = RunTraining(config, model, data, data, table, nullptr, log);
    const auto check = EvaluateModel(model, data, table, run.width);
    c.Expect(check.metrics.exact_match == 100.0,
             std::string(run.name) + " EM " + Fmt("%.1f", check.metrics.exact_match));
    detail += std::string(detail.empty() ? "" : ", ") + run.name + " EM " +
              Fmt("%.0f", check.metrics.exact_match) + " in " +
              std::to_string(summary.epochs_run) + " epochs";
  }
  const double secs = Seconds(start);
  c.Expect(secs < 300.0, "took " + Fmt("%.1f", secs) + " s");
  detail += ", vocab " + std::to_string(vocab.size()) + ", " + Fmt("%.1f", secs) + " s";
  c.Expect(vocab.size() <= 100, "vocabulary too large");
  return c;
}

// Type-safe replacement check for one original surface.
bool SameType(const std::string &type, const std::string &replacement,
              const TypeInventory &inventory) {
  if (type.rfind("number/", 0) == 0) {
    const auto kind = AssignNumberType(replacement);
    return kind && NumberTypeId(*kind) == type;
  }
  const auto t = inventory.TypeOf(replacement);
  return t && *t == type;
}

// Rebuilds a text from its occurrences and a plan, leaving every byte
// outside an occurrence alone.
std::string Rebuild(const std::string &text, std::vector<EntityOccurrence> occ,
                    const SwapPlan &plan) {
  std::sort(occ.begin(), occ.end(),
            [](const auto &a, const auto &b) { return a.byte_begin < b.byte_begin; });
  std::string out;
  std::size_t pos = 0;
  for (const auto &o : occ) {
    out += text.substr(pos, o.byte_begin - pos);
    const auto it = plan.replacements.find(o.surface);
    out += it == plan.replacements.end() ? o.surface : it->second;
    pos = o.byte_end;
  }
  return out + text.substr(pos);
}

// 7. Type swap invariants and document counts.
Criterion TypeSwaps(std::string &detail) {
  Criterion c;
  const World world = DefaultWorld();
  std::istringstream kb(KbText(world));
  const TypeInventory inventory = TypeInventory::Parse(kb, nullptr);
  RngStream rng(707);
  auto pool = SyntheticExamples(world, 200, rng, "syn");
  {
    const std::string text = "Alice moved to Paris in 1999 . Bruno left on Tuesday with 40 km to go .";
    pool.push_back(MakeExample("num1", "t", text, "When did Alice move to Paris ?", "1999",
                               text.find("1999")));
    pool.push_back(MakeExample("num2", "t", text, "Who left on Tuesday ?", "Bruno",
                               text.find("Bruno")));
  }
  std::size_t accepted = 0, attempts = 0;
  while (accepted < 1000 && attempts < 100000) {
    const QAExample &original = pool[attempts++ % pool.size()];
    const auto occ = ExtractEntities(original, inventory);
    const SwapOutcome out = GenerateSwap(original, occ, inventory, rng);
    if (!out.example) continue;
    ++accepted;
    const QAExample &swapped = *out.example;
    for (const auto &[surface, replacement] : out.plan.replacements) {
      c.Expect(replacement != surface, "replacement equals original");
      c.Expect(SameType(out.plan.types.at(surface), replacement, inventory),
               "type changed for " + surface);
    }
    std::vector<EntityOccurrence> in_context, in_question;
    for (const auto &o : occ) (o.in_question ? in_question : in_context).push_back(o);
    c.Expect(swapped.document.text == Rebuild(original.document.text, in_context, out.plan),
             "context bytes differ for " + original.id);
    c.Expect(swapped.question == Rebuild(original.question, in_question, out.plan),
             "question bytes differ for " + original.id);
    const bool question_changed = swapped.question != original.question;
    const bool answer_changed = swapped.answer_text != original.answer_text;
    c.Expect(question_changed || answer_changed, "no mutation for " + original.id);
    c.Expect(swapped.document.IsValid(swapped.answer), "invalid answer tuple");
    c.Expect(swapped.document.IsValid(swapped.answer) &&
                 swapped.document.SpanText(swapped.answer) == swapped.answer_text,
             "answer span text differs for " + original.id);
  }
  c.Expect(accepted == 1000, "only " + std::to_string(accepted) + " accepted");

  // Distinct documents for small examples, by brute force over every
  // variant assignment.
  std::size_t counted = 0;
  const std::vector<std::pair<std::string, std::string>> small = {
      {"Alice lives in Paris .", "Where does Alice live ?"},
      {"Chen works as a baker .", "What does Chen work as ?"},
      {"Dana and Emil like soup .", "Who likes soup ?"},
      {"Farah met Goran in Lima .", "Where did Farah meet Goran ?"},
      {"Hana ate rice in Oslo .", "What did Hana eat ?"},
  };
  for (const auto &[text, question] : small) {
    const auto ex = MakeExample("small", "t", text, question, text.substr(0, text.find(' ')), 0);
    const auto occ = ExtractEntities(ex, inventory);
    std::vector<std::string> surfaces;
    for (const auto &o : occ) {
      if (std::find(surfaces.begin(), surfaces.end(), o.surface) == surfaces.end()) {
        surfaces.push_back(o.surface);
      }
    }
    c.Expect(surfaces.size() <= 3, "fixture has more than 3 entities");
    std::set<std::string> docs;
    std::vector<std::size_t> idx(surfaces.size(), 0);
    while (true) {
      SwapPlan plan;
      for (std::size_t i = 0; i < surfaces.size(); ++i) {
        plan.replacements[surfaces[i]] = inventory.Surfaces(*inventory.TypeOf(surfaces[i]))[idx[i]];
      }
      docs.insert(ApplyPlan(ex, occ, plan).context);
      std::size_t i = 0;
      for (; i < surfaces.size(); ++i) {
        if (++idx[i] < inventory.Surfaces(*inventory.TypeOf(surfaces[i])).size()) break;
        idx[i] = 0;
      }
      if (i == surfaces.size()) break;
    }
    const double predicted = std::exp(LogDocumentCount(occ, inventory));
    c.Expect(std::llround(predicted) == static_cast<long long>(docs.size()),
             text + ": " + Fmt("%.0f", predicted) + " vs " + std::to_string(docs.size()));
    counted += docs.size();
  }
  detail = std::to_string(accepted) + " swaps checked, " + std::to_string(counted) +
           " enumerated documents";
  return c;
}

// 8. Hand-computed evaluation fixtures.
Criterion EvalFixtures(std::string &detail) {
  Criterion c;
  struct Fixture {
    std::string prediction;
    std::vector<std::string> golds;
    double em;
    double f1;
  };
  const std::vector<Fixture> fixtures = {
      {"Jeh Johnson", {"Jeh Johnson"}, 1, 1.0},
      {"Johnson", {"Jeh Johnson"}, 0, 2.0 / 3.0},
      {"Paris", {"London"}, 0, 0.0},
      {"the Beatles", {"Beatles"}, 1, 1.0},
      {"Beatles!", {"The Beatles."}, 1, 1.0},
      {"an owl, a cat", {"owl cat"}, 1, 1.0},
      {"Paris", {"London", "paris"}, 1, 1.0},
      {"New York City", {"York"}, 0, 0.5},
      {"x b b", {"b b c"}, 0, 2.0 / 3.0},
      {"", {"the"}, 1, 1.0},
  };
  for (const auto &f : fixtures) {
    const double em = ExactMatch(f.prediction, f.golds);
    const double f1 = F1Score(f.prediction, f.golds);
    c.Expect(em == f.em, "EM of '" + f.prediction + "'");
    c.Expect(std::abs(f1 - f.f1) <= 1e-15, "F1 of '" + f.prediction + "' " + Fmt("%.17g", f1));
  }
  c.Expect(SentenceMatch({1, 0, 0}, {1, 2, 3}) == 1, "same sentence");
  c.Expect(SentenceMatch({0, 2, 3}, {1, 2, 3}) == 0, "other sentence");
  detail = std::to_string(fixtures.size()) + " EM/F1 fixtures, 2 sentence fixtures";
  return c;
}

World Half(const World &w, bool first) {
  auto half = [&](const std::vector<std::string> &v) {
    const std::size_t m = v.size() / 2;
    return first ? std::vector<std::string>(v.begin(), v.begin() + m)
                 : std::vector<std::string>(v.begin() + m, v.end());
  };
  return {half(w.people), half(w.cities), half(w.jobs), half(w.foods)};
}

// 9. Augmentation helps on held-out surfaces.
Criterion AugmentationTrend(std::string &detail) {
  Criterion c;
  const auto start = Clock::now();
  const World world = DefaultWorld();
  std::istringstream kb(KbText(world));
  const TypeInventory inventory = TypeInventory::Parse(kb, nullptr);
  const auto table = RandomTable(Vocabulary(world), 16, 11);
  int wins = 0;
  std::string runs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream rng(100 + seed);
    // Train on half of every entity list, evaluate on the other half.
    const auto train = SyntheticExamples(Half(world, true), 400, rng, "train");
    const auto dev = SyntheticExamples(Half(world, false), 100, rng, "dev");
    double em[2] = {0.0, 0.0};
    for (int augmented = 0; augmented < 2; ++augmented) {
      RunConfig config;
      config.depth = 1;
      config.hidden = 16;
      config.embed_dim = 16;
      config.recurrent_dropout = 0.0;
      config.fc_dropout = 0.0;
      config.weight_noise = 0.0;
      config.learning_rate = 0.01;
      config.batch_size = 8;
      config.beam_width = 4;
      config.augment_count = augmented ? 200 : 0;
      config.max_epochs = 8;
      config.patience = 8;
      config.seed = seed;
      GnrModel model(config.dims(), seed);
      std::ostringstream log;
      em[augmented] = RunTraining(config, model, train, dev, table, &inventory, log).best_dev_em;
    }
    if (em[1] >= em[0]) ++wins;
    runs += (runs.empty() ? "" : " ") + Fmt("%.0f", em[0]) + "/" + Fmt("%.0f", em[1]);
  }
  c.Expect(wins >= 4, std::to_string(wins) + " of 5 seeds");
  detail = "dev EM T=0/T=200: " + runs + ", " + std::to_string(wins) + " of 5 seeds, " +
           Fmt("%.1f", Seconds(start)) + " s";
  return c;
}

std::string ReadBytes(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void WriteBytes(const std::filesystem::path &p, const std::string &bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

// 10. Two identical training runs.
Criterion Determinism(std::string &detail) {
  Criterion c;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "gnr_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const World world = DefaultWorld();
  RngStream rng(1010);
  WriteBytes(root / "train.json", ToSquadJson(SyntheticExamples(world, 40, rng, "t")));
  WriteBytes(root / "dev.json", ToSquadJson(SyntheticExamples(world, 10, rng, "d")));
  WriteBytes(root / "kb.tsv", KbText(world));
  {
    std::ofstream vec(root / "vectors.txt");
    RngStream vr(1011);
    for (const auto &w : Vocabulary(world)) {
      vec << w;
      for (double v : RandomValues(8, vr)) vec << " " << Fmt("%.6f", v);
      vec << "\n";
    }
  }
  RunConfig config;
  config.depth = 1;
  config.hidden = 8;
  config.embed_dim = 8;
  config.batch_size = 8;
  config.beam_width = 4;
  config.augment_count = 20;
  config.max_epochs = 3;
  config.seed = 77;
  config.train_path = (root / "train.json").string();
  config.dev_path = (root / "dev.json").string();
  config.kb_path = (root / "kb.tsv").string();
  config.vectors_path = (root / "vectors.txt").string();
  config.checkpoint_dir = (root / "run").string();
  std::string logs[2], ckpts[2], stdout_text[2];
  for (int i = 0; i < 2; ++i) {
    fs::remove_all(root / "run");
    std::ostringstream out;
    CommandTrain(config, out);
    stdout_text[i] = out.str();
    logs[i] = ReadBytes(root / "run" / "train.log");
    ckpts[i] = ReadBytes(root / "run" / "model.ckpt");
  }
  c.Expect(!logs[0].empty() && !ckpts[0].empty(), "missing outputs");
  c.Expect(logs[0] == logs[1], "training logs differ");
  c.Expect(ckpts[0] == ckpts[1], "checkpoints differ");
  c.Expect(stdout_text[0] == stdout_text[1], "console output differs");
  detail = "log " + std::to_string(logs[0].size()) + " bytes, checkpoint " +
           std::to_string(ckpts[0].size()) + " bytes, identical";
  fs::remove_all(root);
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int number;
    const char *title;
    Criterion (*run)(std::string &);
  };
  const Entry entries[] = {
      {1, "gradient suite", GradientSuite},
      {2, "partition oracle", PartitionOracle},
      {3, "normalization semantics", NormalizationSemantics},
      {4, "early update", EarlyUpdate},
      {5, "conditional end scoring", ConditionalComputation},
      {6, "overfit sanity", Overfit},
      {7, "type swap invariants", TypeSwaps},
      {8, "evaluation fixtures", EvalFixtures},
      {9, "augmentation trend", AugmentationTrend},
      {10, "determinism", Determinism},
  };
  int failed = 0;
  for (const auto &e : entries) {
    std::string detail;
    Criterion c;
    try {
      c = e.run(detail);
    } catch (const std::exception &ex) {
      c.Expect(false, std::string("exception: ") + ex.what());
    }
    if (!c.ok()) ++failed;
    std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << e.number << ": " << e.title;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    if (!c.ok()) std::cout << " [" << c.Notes() << "]";
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
