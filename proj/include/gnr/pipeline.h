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

// Run configuration and the train / augment / predict / eval drivers.

#ifndef GNR_PIPELINE_H_
#define GNR_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnr/dataset.h"
#include "gnr/embeddings.h"
#include "gnr/eval.h"
#include "gnr/model.h"
#include "gnr/search.h"
#include "gnr/typeswaps.h"

namespace gnr {

struct RunConfig {
  // model
  std::size_t depth = 3;
  std::size_t hidden = 200;
  std::size_t embed_dim = 300;
  std::size_t end_depth = 1;
  double recurrent_dropout = 0.3;
  double fc_dropout = 0.4;
  double weight_noise = 1e-6;
  // optimizer
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 32;
  // search
  std::size_t beam_width = 32;
  Normalization normalization = Normalization::kGlobal;
  // augmentation
  std::size_t augment_count = 10000;
  std::string kb_path;
  // data
  std::string train_path;
  std::string dev_path;
  std::string vectors_path;
  std::string checkpoint_dir;
  std::size_t max_tokens = 0;  // 0: no cap
  // schedule
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 1;

  ModelDims dims() const { return {depth, hidden, embed_dim, end_depth}; }
  bool operator==(const RunConfig &) const = default;
};

const std::vector<std::string> &ConfigKeys();
// Throws InputError for unknown keys or unparsable values.
void SetConfigValue(RunConfig &config, std::string_view key, std::string_view value);
std::string GetConfigValue(const RunConfig &config, std::string_view key);
// "key = value" lines; '#' starts a comment line.
RunConfig ParseConfig(std::string_view text);
RunConfig LoadConfig(const std::string &path);
// Every key, in ConfigKeys() order. Parses back to an equal config.
std::string FormatConfig(const RunConfig &config);

struct EvalResult {
  Metrics metrics;
  std::vector<ExampleScore> scores;
  std::vector<Prediction> predictions;
};

EvalResult EvaluateModel(const GnrModel &model, std::span<const QAExample> dataset,
                         const WordVectorTable &table, std::size_t beam_width,
                         std::size_t max_tokens = 0);

struct TrainSummary {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_dev_em = -1.0;
  std::string best_checkpoint;  // encoded parameters
};

// Epochs over the training data plus `augment_count` fresh type swaps per
// epoch when an inventory is given. Dev metrics are logged after every
// epoch; training stops on a perfect dev EM, after `patience` epochs
// without improvement, or at `max_epochs`. The model is left holding the
// best-dev parameters. With a non-empty checkpoint_dir, model.ckpt,
// config.txt and train.log are written there.
TrainSummary RunTraining(const RunConfig &config, GnrModel &model,
                         std::span<const QAExample> train,
                         std::span<const QAExample> dev,
                         const WordVectorTable &table,
                         const TypeInventory *inventory, std::ostream &log);

// id -> {text, prob, answer}
std::string PredictionsToJson(std::span<const QAExample> dataset,
                              std::span<const Prediction> predictions);
// Scores a predictions file against a dataset. Missing ids count as empty
// answers from no sentence.
EvalResult EvaluatePredictions(std::span<const QAExample> dataset,
                               std::string_view predictions_json);

// File-level commands used by the command-line tool.
void CommandTrain(const RunConfig &config, std::ostream &out);
AugmentReport CommandAugment(const RunConfig &config, const std::string &output);
void CommandPredict(const RunConfig &config, const std::string &input,
                    const std::string &output);
Metrics CommandEval(const RunConfig &config, const std::string &input,
                    const std::string &predictions, const std::string &report);

}  // namespace gnr

#endif  // GNR_PIPELINE_H_
