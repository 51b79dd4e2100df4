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

// gnr train | augment | predict | eval
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gnr/errors.h"
#include "gnr/pipeline.h"

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumeric = 3;

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::optional<std::string>> overrides;

  void Register(CLI::App *cmd) {
    cmd->add_option("--config", config_path, "key = value config file");
    for (const auto &key : gnr::ConfigKeys()) {
      cmd->add_option("--" + key, overrides[key]);
    }
  }

  // File, then GNR_SEED, then explicit flags.
  gnr::RunConfig Resolve() const {
    gnr::RunConfig config;
    if (!config_path.empty()) config = gnr::LoadConfig(config_path);
    if (const char *seed = std::getenv("GNR_SEED")) gnr::SetConfigValue(config, "seed", seed);
    for (const auto &[key, value] : overrides) {
      if (value) gnr::SetConfigValue(config, key, *value);
    }
    return config;
  }
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Globally normalized reader: train, augment, predict, eval"};
  app.require_subcommand(1);

  ConfigFlags train_flags;
  CLI::App *train = app.add_subcommand("train", "train a model and keep the best-dev checkpoint");
  train_flags.Register(train);

  ConfigFlags augment_flags;
  std::string augment_out;
  CLI::App *augment = app.add_subcommand("augment", "write type-swapped training examples");
  augment_flags.Register(augment);
  augment->add_option("--output", augment_out, "SQuAD JSON output")->required();

  ConfigFlags predict_flags;
  std::string predict_in;
  std::string predict_out;
  CLI::App *predict = app.add_subcommand("predict", "predict answers from a checkpoint");
  predict_flags.Register(predict);
  predict->add_option("--input", predict_in, "SQuAD JSON questions")->required();
  predict->add_option("--output", predict_out, "predictions JSON")->required();

  ConfigFlags eval_flags;
  std::string eval_in;
  std::string eval_predictions;
  std::string eval_report;
  CLI::App *eval = app.add_subcommand("eval", "score predictions or a checkpoint");
  eval_flags.Register(eval);
  eval->add_option("--input", eval_in, "SQuAD JSON with gold answers")->required();
  eval->add_option("--predictions", eval_predictions,
                   "predictions JSON; without it the checkpoint is run");
  eval->add_option("--report", eval_report, "JSON-lines report output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*train) {
      gnr::CommandTrain(train_flags.Resolve(), std::cout);
    } else if (*augment) {
      const gnr::AugmentReport report =
          gnr::CommandAugment(augment_flags.Resolve(), augment_out);
      std::cout << report.ToJson() << "\n";
    } else if (*predict) {
      gnr::CommandPredict(predict_flags.Resolve(), predict_in, predict_out);
    } else if (*eval) {
      const gnr::Metrics m =
          gnr::CommandEval(eval_flags.Resolve(), eval_in, eval_predictions, eval_report);
      std::printf("exact_match %.4f f1 %.4f sentence %.4f count %zu\n", m.exact_match,
                  m.f1, m.sentence_accuracy, m.count);
    }
  } catch (const gnr::InputError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const gnr::NumericError &e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const gnr::DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
  return 0;
}
