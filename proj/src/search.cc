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

#include "gnr/search.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gnr/errors.h"

namespace gnr {

FixedScorer::FixedScorer(Tensor sentences, std::vector<Tensor> starts,
                         std::vector<std::vector<Tensor>> ends)
    : sentences_(std::move(sentences)),
      starts_(std::move(starts)),
      ends_(std::move(ends)) {
  if (sentences_.size() != starts_.size() || starts_.size() != ends_.size()) {
    throw ShapeError("fixed scorer: " + std::to_string(sentences_.size()) +
                     " sentence scores, " + std::to_string(starts_.size()) +
                     " start lists, " + std::to_string(ends_.size()) +
                     " end lists");
  }
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    const std::size_t m = starts_[i].size();
    if (m == 0 || ends_[i].size() != m) {
      throw ShapeError("fixed scorer: sentence " + std::to_string(i) +
                       " has inconsistent start/end tables");
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (ends_[i][j].size() != m - j) {
        throw ShapeError("fixed scorer: sentence " + std::to_string(i) +
                         ", start " + std::to_string(j) + " needs " +
                         std::to_string(m - j) + " end scores");
      }
    }
  }
}

FixedScorer FixedScorer::FromValues(
    const std::vector<double> &sentences,
    const std::vector<std::vector<double>> &starts,
    const std::vector<std::vector<std::vector<double>>> &ends) {
  std::vector<Tensor> start_tensors;
  for (const auto &s : starts) start_tensors.push_back(Tensor::Constant({s.size()}, s));
  std::vector<std::vector<Tensor>> end_tensors;
  for (const auto &per_sentence : ends) {
    std::vector<Tensor> row;
    for (const auto &e : per_sentence) row.push_back(Tensor::Constant({e.size()}, e));
    end_tensors.push_back(std::move(row));
  }
  return FixedScorer(Tensor::Constant({sentences.size()}, sentences),
                     std::move(start_tensors), std::move(end_tensors));
}

std::size_t FixedScorer::sentence_length(std::size_t sentence) const {
  return starts_.at(sentence).size();
}

Tensor FixedScorer::StartScores(std::size_t sentence) {
  if (sentence >= starts_.size()) {
    throw InputError("sentence index " + std::to_string(sentence) + " out of range");
  }
  return starts_[sentence];
}

Tensor FixedScorer::EndScores(std::size_t sentence, std::size_t start) {
  if (sentence >= starts_.size() || start >= starts_[sentence].size()) {
    throw InputError("start (" + std::to_string(sentence) + ", " +
                     std::to_string(start) + ") out of range");
  }
  const std::pair<std::size_t, std::size_t> key{sentence, start};
  if (std::find(end_calls_.begin(), end_calls_.end(), key) == end_calls_.end()) {
    end_calls_.push_back(key);
  }
  return ends_[sentence][start];
}

bool RanksBefore(const SearchCandidate &a, const SearchCandidate &b) {
  if (a.score != b.score) return a.score > b.score;
  return a.tuple < b.tuple;
}

void Beam::Fill(std::vector<SearchCandidate> pool) {
  const std::size_t keep = std::min(width_, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep),
                    pool.end(), RanksBefore);
  pool.resize(keep);
  candidates_ = std::move(pool);
}

bool Beam::Contains(const AnswerTuple &tuple) const {
  return std::any_of(candidates_.begin(), candidates_.end(),
                     [&](const SearchCandidate &c) { return c.tuple == tuple; });
}

bool Beam::ContainsGold() const {
  return std::any_of(candidates_.begin(), candidates_.end(),
                     [](const SearchCandidate &c) { return c.gold_prefix; });
}

void CheckAnswer(const StageScorer &scorer, const AnswerTuple &a) {
  if (a.sentence >= scorer.num_sentences() || a.start > a.end ||
      a.end >= scorer.sentence_length(a.sentence)) {
    throw DataError("answer (" + std::to_string(a.sentence) + ", " +
                    std::to_string(a.start) + ", " + std::to_string(a.end) +
                    ") is not a valid answer for this document");
  }
}

SearchTrace RunBeamSearch(StageScorer &scorer, std::size_t width,
                          const std::optional<AnswerTuple> &gold) {
  if (width == 0) throw InputError("beam width must be at least 1");
  if (scorer.num_sentences() == 0) throw InputError("cannot search an empty document");
  if (gold) CheckAnswer(scorer, *gold);

  SearchTrace trace;
  for (auto &b : trace.beams) b = Beam(width);

  const Tensor sentence_scores = scorer.SentenceScores();
  std::vector<SearchCandidate> pool;
  for (std::size_t i = 0; i < scorer.num_sentences(); ++i) {
    pool.push_back({Stage::kSentenceChosen, {i, 0, 0}, sentence_scores[i],
                    gold && gold->sentence == i});
  }
  trace.beams[0].Fill(std::move(pool));
  trace.stages_run = 1;
  if (gold && !trace.beams[0].ContainsGold()) {
    trace.gold_fell_off = Stage::kSentenceChosen;
    return trace;
  }

  pool.clear();
  for (const SearchCandidate &c : trace.beams[0].candidates()) {
    const Tensor starts = scorer.StartScores(c.tuple.sentence);
    for (std::size_t j = 0; j < starts.size(); ++j) {
      pool.push_back({Stage::kStartChosen, {c.tuple.sentence, j, 0},
                      c.score + starts[j], c.gold_prefix && gold->start == j});
    }
  }
  trace.beams[1].Fill(std::move(pool));
  trace.stages_run = 2;
  if (gold && !trace.beams[1].ContainsGold()) {
    trace.gold_fell_off = Stage::kStartChosen;
    return trace;
  }

  pool.clear();
  for (const SearchCandidate &c : trace.beams[1].candidates()) {
    const std::size_t i = c.tuple.sentence, j = c.tuple.start;
    const Tensor ends = scorer.EndScores(i, j);
    for (std::size_t x = 0; x < ends.size(); ++x) {
      pool.push_back({Stage::kComplete, {i, j, j + x}, c.score + ends[x],
                      c.gold_prefix && gold->end == j + x});
    }
  }
  trace.beams[2].Fill(std::move(pool));
  trace.stages_run = 3;
  if (gold && !trace.beams[2].ContainsGold()) {
    trace.gold_fell_off = Stage::kComplete;
  }
  return trace;
}

Beam BeamDecode(StageScorer &scorer, std::size_t width) {
  return RunBeamSearch(scorer, width).final_beam();
}

std::vector<std::pair<AnswerTuple, double>> EnumerateAnswers(StageScorer &scorer) {
  std::vector<std::pair<AnswerTuple, double>> out;
  const Tensor sentences = scorer.SentenceScores();
  for (std::size_t i = 0; i < scorer.num_sentences(); ++i) {
    const Tensor starts = scorer.StartScores(i);
    for (std::size_t j = 0; j < starts.size(); ++j) {
      const Tensor ends = scorer.EndScores(i, j);
      for (std::size_t x = 0; x < ends.size(); ++x) {
        out.push_back({{i, j, j + x}, sentences[i] + starts[j] + ends[x]});
      }
    }
  }
  return out;
}

std::size_t CountAnswers(const StageScorer &scorer) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < scorer.num_sentences(); ++i) {
    const std::size_t m = scorer.sentence_length(i);
    n += m * (m + 1) / 2;
  }
  return n;
}

Tensor PrefixScore(StageScorer &scorer, const AnswerTuple &a, Stage stage) {
  Tensor score = Pick(scorer.SentenceScores(), a.sentence);
  if (stage == Stage::kSentenceChosen) return score;
  score = Add(score, Pick(scorer.StartScores(a.sentence), a.start));
  if (stage == Stage::kStartChosen) return score;
  return Add(score, Pick(scorer.EndScores(a.sentence, a.start), a.end - a.start));
}

Tensor AnswerScore(StageScorer &scorer, const AnswerTuple &a) {
  CheckAnswer(scorer, a);
  return PrefixScore(scorer, a, Stage::kComplete);
}

namespace {

Tensor LogSoftmaxAt(const Tensor &scores, std::size_t index) {
  return Sub(Pick(scores, index), LogSumExp(scores));
}

}  // namespace

Tensor LocalLogProb(StageScorer &scorer, const AnswerTuple &a) {
  CheckAnswer(scorer, a);
  Tensor lp = LogSoftmaxAt(scorer.SentenceScores(), a.sentence);
  lp = Add(lp, LogSoftmaxAt(scorer.StartScores(a.sentence), a.start));
  return Add(lp, LogSoftmaxAt(scorer.EndScores(a.sentence, a.start), a.end - a.start));
}

std::array<double, 3> LocalPathProbabilities(StageScorer &scorer,
                                             const AnswerTuple &a) {
  CheckAnswer(scorer, a);
  const double p1 = LogSoftmaxAt(scorer.SentenceScores(), a.sentence).item();
  const double p2 = LogSoftmaxAt(scorer.StartScores(a.sentence), a.start).item();
  const double p3 =
      LogSoftmaxAt(scorer.EndScores(a.sentence, a.start), a.end - a.start).item();
  return {std::exp(p1), std::exp(p1 + p2), std::exp(p1 + p2 + p3)};
}

Tensor ExactLogPartition(StageScorer &scorer) {
  if (scorer.num_sentences() == 0) throw InputError("empty document");
  std::vector<Tensor> scores;
  for (std::size_t i = 0; i < scorer.num_sentences(); ++i) {
    for (std::size_t j = 0; j < scorer.sentence_length(i); ++j) {
      for (std::size_t k = j; k < scorer.sentence_length(i); ++k) {
        scores.push_back(PrefixScore(scorer, {i, j, k}, Stage::kComplete));
      }
    }
  }
  return LogSumExp(Concat(scores));
}

Tensor GlobalLogProbExact(StageScorer &scorer, const AnswerTuple &a) {
  return Sub(AnswerScore(scorer, a), ExactLogPartition(scorer));
}

Tensor BeamLogPartition(StageScorer &scorer, const Beam &final_beam,
                        const std::optional<AnswerTuple> &force) {
  std::vector<Tensor> scores;
  for (const SearchCandidate &c : final_beam.candidates()) {
    if (c.stage != Stage::kComplete) {
      throw ContractError("partition over a beam with incomplete candidates");
    }
    scores.push_back(PrefixScore(scorer, c.tuple, Stage::kComplete));
  }
  if (force && !final_beam.Contains(*force)) {
    scores.push_back(AnswerScore(scorer, *force));
  }
  if (scores.empty()) throw ContractError("partition over an empty beam");
  return LogSumExp(Concat(scores));
}

Tensor GlobalLogProbBeam(StageScorer &scorer, const AnswerTuple &a,
                         const Beam &final_beam, bool force_include) {
  if (!force_include && !final_beam.Contains(a)) {
    throw ContractError("answer (" + std::to_string(a.sentence) + ", " +
                        std::to_string(a.start) + ", " + std::to_string(a.end) +
                        ") is not on the beam");
  }
  return Sub(AnswerScore(scorer, a),
             BeamLogPartition(scorer, final_beam,
                              force_include ? std::optional<AnswerTuple>(a)
                                            : std::nullopt));
}

std::vector<double> BeamProbabilities(const Beam &beam) {
  std::vector<double> p;
  if (beam.empty()) return p;
  double mx = beam.candidates().front().score;
  for (const auto &c : beam.candidates()) mx = std::max(mx, c.score);
  double z = 0.0;
  for (const auto &c : beam.candidates()) z += std::exp(c.score - mx);
  for (const auto &c : beam.candidates()) p.push_back(std::exp(c.score - mx) / z);
  return p;
}

LossResult SearchLoss(StageScorer &scorer, const AnswerTuple &gold,
                      std::size_t width, Normalization normalization) {
  CheckAnswer(scorer, gold);
  LossResult result;
  if (normalization == Normalization::kLocal) {
    result.loss = Scale(LocalLogProb(scorer, gold), -1.0);
    return result;
  }

  result.trace = RunBeamSearch(scorer, width, gold);
  // Losing the gold only at the last stage is not an early update: the gold
  // joins the final partition sum instead.
  if (result.trace.gold_fell_off &&
      *result.trace.gold_fell_off != Stage::kComplete) {
    const Stage stage = *result.trace.gold_fell_off;
    const Beam &beam = result.trace.beams[static_cast<std::size_t>(stage)];
    std::vector<Tensor> scores;
    for (const SearchCandidate &c : beam.candidates()) {
      scores.push_back(PrefixScore(scorer, c.tuple, stage));
    }
    Tensor gold_score = PrefixScore(scorer, gold, stage);
    scores.push_back(gold_score);
    result.loss = Sub(LogSumExp(Concat(scores)), gold_score);
    result.early_update = stage;
    return result;
  }
  result.loss = Sub(BeamLogPartition(scorer, result.trace.final_beam(), gold),
                    AnswerScore(scorer, gold));
  return result;
}

}  // namespace gnr
