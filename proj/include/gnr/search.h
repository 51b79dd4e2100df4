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

// Staged answer search: pick a sentence, then a start word inside it, then
// an end word at or after the start. An answer's score is the sum of the
// three stage scores.
//
// Two normalizations are provided. Local: every stage is its own softmax,
// so the path probability is a product of conditionals. Global: one softmax
// over complete answers, with the partition function either enumerated
// exactly or approximated by the final beam. Training in global mode uses
// early updates: when the gold prefix leaves the beam at some stage, the
// loss is the gold prefix score normalized over that stage's beam plus the
// gold, and the search stops there.

#ifndef GNR_SEARCH_H_
#define GNR_SEARCH_H_

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "gnr/tensor.h"
#include "gnr/text.h"

namespace gnr {

// Source of the three stage scores for one document. Implementations
// memoize, so asking twice for the same scores returns the same graph nodes.
class StageScorer {
 public:
  virtual ~StageScorer() = default;

  virtual std::size_t num_sentences() const = 0;
  virtual std::size_t sentence_length(std::size_t sentence) const = 0;

  // [n] sentence scores.
  virtual Tensor SentenceScores() = 0;
  // [m_i] start scores of every word in the sentence.
  virtual Tensor StartScores(std::size_t sentence) = 0;
  // [m_i - start] end scores for end words start..m_i-1.
  virtual Tensor EndScores(std::size_t sentence, std::size_t start) = 0;

  // Number of distinct (sentence, start) pairs whose end scores were
  // computed so far.
  virtual std::size_t end_scorer_calls() const = 0;
};

// Table-driven scorer for tests and fixtures. Scores may be constants or
// parameter tensors (for gradient checks).
class FixedScorer : public StageScorer {
 public:
  // ends[i][j] holds the end scores for start j of sentence i.
  FixedScorer(Tensor sentences, std::vector<Tensor> starts,
              std::vector<std::vector<Tensor>> ends);
  static FixedScorer FromValues(
      const std::vector<double> &sentences,
      const std::vector<std::vector<double>> &starts,
      const std::vector<std::vector<std::vector<double>>> &ends);

  std::size_t num_sentences() const override { return starts_.size(); }
  std::size_t sentence_length(std::size_t sentence) const override;
  Tensor SentenceScores() override { return sentences_; }
  Tensor StartScores(std::size_t sentence) override;
  Tensor EndScores(std::size_t sentence, std::size_t start) override;
  std::size_t end_scorer_calls() const override { return end_calls_.size(); }

 private:
  Tensor sentences_;
  std::vector<Tensor> starts_;
  std::vector<std::vector<Tensor>> ends_;
  std::vector<std::pair<std::size_t, std::size_t>> end_calls_;
};

enum class Stage { kSentenceChosen = 0, kStartChosen = 1, kComplete = 2 };

struct SearchCandidate {
  Stage stage = Stage::kSentenceChosen;
  // Fields past the stage are zero.
  AnswerTuple tuple;
  double score = 0.0;  // cumulative raw score
  bool gold_prefix = false;
};

// Orders by score descending, then (sentence, start, end) ascending.
bool RanksBefore(const SearchCandidate &a, const SearchCandidate &b);

class Beam {
 public:
  explicit Beam(std::size_t width = 1) : width_(width) {}

  std::size_t width() const { return width_; }
  const std::vector<SearchCandidate> &candidates() const { return candidates_; }
  std::size_t size() const { return candidates_.size(); }
  bool empty() const { return candidates_.empty(); }
  const SearchCandidate &top() const { return candidates_.front(); }

  // Sorts the pool and keeps the best `width` candidates.
  void Fill(std::vector<SearchCandidate> pool);
  bool Contains(const AnswerTuple &tuple) const;
  bool ContainsGold() const;

 private:
  std::size_t width_;
  std::vector<SearchCandidate> candidates_;
};

struct SearchTrace {
  // Beams after pruning at each stage; later stages are empty when the
  // search stopped early.
  std::array<Beam, 3> beams;
  std::size_t stages_run = 0;
  // Stage at which the gold prefix was pruned, if it was.
  std::optional<Stage> gold_fell_off;

  const Beam &final_beam() const { return beams[2]; }
};

// Width-`width` global beam over all three stages. With a gold tuple the
// candidates on the gold path are flagged, and the search stops at the
// first stage whose beam loses the gold prefix.
SearchTrace RunBeamSearch(StageScorer &scorer, std::size_t width,
                          const std::optional<AnswerTuple> &gold = std::nullopt);

// Final beam of Complete candidates; the top candidate is the prediction.
Beam BeamDecode(StageScorer &scorer, std::size_t width);

// Every valid answer tuple with its score, in (i, j, k) order. Computes end
// scores for every start; intended for small documents and oracles.
std::vector<std::pair<AnswerTuple, double>> EnumerateAnswers(StageScorer &scorer);
std::size_t CountAnswers(const StageScorer &scorer);

void CheckAnswer(const StageScorer &scorer, const AnswerTuple &a);

Tensor AnswerScore(StageScorer &scorer, const AnswerTuple &a);
// Cumulative score of the prefix of `a` through `stage`.
Tensor PrefixScore(StageScorer &scorer, const AnswerTuple &a, Stage stage);

// log P_sent(i) + log P_sw(j | i) + log P_ew(k | i, j).
Tensor LocalLogProb(StageScorer &scorer, const AnswerTuple &a);
// Cumulative locally normalized probabilities after each stage.
std::array<double, 3> LocalPathProbabilities(StageScorer &scorer,
                                             const AnswerTuple &a);

// log Z over all valid answers.
Tensor ExactLogPartition(StageScorer &scorer);
Tensor GlobalLogProbExact(StageScorer &scorer, const AnswerTuple &a);

// log of the final-beam partition sum. The answer `force` (usually the
// gold) is added to the sum when it is not on the beam.
Tensor BeamLogPartition(StageScorer &scorer, const Beam &final_beam,
                        const std::optional<AnswerTuple> &force = std::nullopt);
// score(a) - log Z_beam. Throws ContractError when `a` is not on the beam
// and not force-included.
Tensor GlobalLogProbBeam(StageScorer &scorer, const AnswerTuple &a,
                         const Beam &final_beam, bool force_include = false);

// Probability of every candidate of one beam, normalized over that beam.
std::vector<double> BeamProbabilities(const Beam &beam);

enum class Normalization { kLocal, kGlobal };

struct LossResult {
  Tensor loss;
  // Set for global-mode early updates.
  std::optional<Stage> early_update;
  SearchTrace trace;
};

// Negative log-likelihood of the gold answer. Global mode approximates the
// partition function with the beam and performs early updates; local mode
// is exact and does not search.
LossResult SearchLoss(StageScorer &scorer, const AnswerTuple &gold,
                      std::size_t width, Normalization normalization);

}  // namespace gnr

#endif  // GNR_SEARCH_H_
