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

#include "gnr/pipeline.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "gnr/errors.h"

namespace gnr {
namespace {

using json = nlohmann::json;

std::size_t ParseSize(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw InputError("config '" + std::string(key) + "': expected a non-negative integer, got '" +
                     std::string(v) + "'");
  }
  return static_cast<std::size_t>(out);
}

double ParseDouble(std::string_view key, std::string_view v) {
  const std::string s(v);
  char *end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InputError("config '" + std::string(key) + "': expected a number, got '" + s + "'");
  }
  return out;
}

std::string FormatDouble(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  if (std::strtod(buf, nullptr) != x) std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Field {
  std::function<void(RunConfig &, std::string_view, std::string_view)> set;
  std::function<std::string(const RunConfig &)> get;
};

template <typename T>
Field SizeField(T RunConfig::*member) {
  return {[member](RunConfig &c, std::string_view k, std::string_view v) {
            c.*member = static_cast<T>(ParseSize(k, v));
          },
          [member](const RunConfig &c) { return std::to_string(c.*member); }};
}

Field DoubleField(double RunConfig::*member) {
  return {[member](RunConfig &c, std::string_view k, std::string_view v) {
            c.*member = ParseDouble(k, v);
          },
          [member](const RunConfig &c) { return FormatDouble(c.*member); }};
}

Field StringField(std::string RunConfig::*member) {
  return {[member](RunConfig &c, std::string_view, std::string_view v) {
            c.*member = std::string(v);
          },
          [member](const RunConfig &c) { return c.*member; }};
}

const std::vector<std::pair<std::string, Field>> &Fields() {
  static const auto *fields = new std::vector<std::pair<std::string, Field>>{
      {"depth", SizeField(&RunConfig::depth)},
      {"hidden", SizeField(&RunConfig::hidden)},
      {"embed_dim", SizeField(&RunConfig::embed_dim)},
      {"end_depth", SizeField(&RunConfig::end_depth)},
      {"recurrent_dropout", DoubleField(&RunConfig::recurrent_dropout)},
      {"fc_dropout", DoubleField(&RunConfig::fc_dropout)},
      {"weight_noise", DoubleField(&RunConfig::weight_noise)},
      {"learning_rate", DoubleField(&RunConfig::learning_rate)},
      {"beta1", DoubleField(&RunConfig::beta1)},
      {"beta2", DoubleField(&RunConfig::beta2)},
      {"epsilon", DoubleField(&RunConfig::epsilon)},
      {"batch_size", SizeField(&RunConfig::batch_size)},
      {"beam_width", SizeField(&RunConfig::beam_width)},
      {"normalization",
       {[](RunConfig &c, std::string_view k, std::string_view v) {
          if (v == "local") {
            c.normalization = Normalization::kLocal;
          } else if (v == "global") {
            c.normalization = Normalization::kGlobal;
          } else {
            throw InputError("config '" + std::string(k) +
                             "': expected 'local' or 'global', got '" + std::string(v) + "'");
          }
        },
        [](const RunConfig &c) {
          return std::string(c.normalization == Normalization::kLocal ? "local" : "global");
        }}},
      {"augment_count", SizeField(&RunConfig::augment_count)},
      {"kb_path", StringField(&RunConfig::kb_path)},
      {"train_path", StringField(&RunConfig::train_path)},
      {"dev_path", StringField(&RunConfig::dev_path)},
      {"vectors_path", StringField(&RunConfig::vectors_path)},
      {"checkpoint_dir", StringField(&RunConfig::checkpoint_dir)},
      {"max_tokens", SizeField(&RunConfig::max_tokens)},
      {"max_epochs", SizeField(&RunConfig::max_epochs)},
      {"patience", SizeField(&RunConfig::patience)},
      {"seed", SizeField(&RunConfig::seed)},
  };
  return *fields;
}

const Field &FindField(std::string_view key) {
  for (const auto &[name, field] : Fields()) {
    if (name == key) return field;
  }
  throw InputError("unknown config key '" + std::string(key) + "'");
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string Fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path + "'");
}

void Validate(const RunConfig &c) {
  if (c.batch_size == 0) throw InputError("batch_size must be positive");
  if (c.beam_width == 0) throw InputError("beam_width must be positive");
  if (c.hidden == 0 || c.depth == 0 || c.end_depth == 0 || c.embed_dim == 0) {
    throw InputError("model dimensions must be positive");
  }
}

std::vector<QAExample> LoadExamples(const std::string &path, const char *what,
                                    std::ostream *log) {
  if (path.empty()) throw DataError(std::string("no ") + what + " path configured");
  LoadedDataset data = LoadSquad(path);
  if (log) *log << what << " " << data.report.ToJson() << "\n";
  return std::move(data.examples);
}

std::string CheckpointPath(const RunConfig &c) {
  return (std::filesystem::path(c.checkpoint_dir) / "model.ckpt").string();
}

void LoadModelFromCheckpoint(const RunConfig &config, GnrModel &model) {
  if (config.checkpoint_dir.empty()) throw DataError("no checkpoint_dir configured");
  LoadCheckpoint(CheckpointPath(config), model.store());
}

}  // namespace

const std::vector<std::string> &ConfigKeys() {
  static const auto *keys = [] {
    auto *k = new std::vector<std::string>;
    for (const auto &[name, field] : Fields()) k->push_back(name);
    return k;
  }();
  return *keys;
}

void SetConfigValue(RunConfig &config, std::string_view key, std::string_view value) {
  FindField(key).set(config, key, Trim(value));
}

std::string GetConfigValue(const RunConfig &config, std::string_view key) {
  return FindField(key).get(config);
}

RunConfig ParseConfig(std::string_view text) {
  RunConfig config;
  std::size_t number = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = Trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++number;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    SetConfigValue(config, Trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return config;
}

RunConfig LoadConfig(const std::string &path) { return ParseConfig(ReadFile(path)); }

std::string FormatConfig(const RunConfig &config) {
  std::string out;
  for (const auto &[name, field] : Fields()) {
    out += name + " = " + field.get(config) + "\n";
  }
  return out;
}

EvalResult EvaluateModel(const GnrModel &model, std::span<const QAExample> dataset,
                         const WordVectorTable &table, std::size_t beam_width,
                         std::size_t max_tokens) {
  EvalResult out;
  for (const auto &ex : dataset) {
    Prediction p = Predict(ex.document, ex.question_tokens, model, table, beam_width,
                           max_tokens);
    out.scores.push_back(ScoreExample(ex, p.text, p.answer));
    out.predictions.push_back(std::move(p));
  }
  out.metrics = Aggregate(out.scores);
  return out;
}

TrainSummary RunTraining(const RunConfig &config, GnrModel &model,
                         std::span<const QAExample> train,
                         std::span<const QAExample> dev,
                         const WordVectorTable &table,
                         const TypeInventory *inventory, std::ostream &log) {
  Validate(config);
  if (train.empty()) throw DataError("training set is empty");
  const std::span<const QAExample> held_out = dev.empty() ? train : dev;
  const bool write = !config.checkpoint_dir.empty();
  if (write) std::filesystem::create_directories(config.checkpoint_dir);

  RngStream rng = RngStream(config.seed).Fork(1);
  TrainOptions opts;
  opts.beam_width = config.beam_width;
  opts.normalization = config.normalization;
  opts.recurrent_dropout = config.recurrent_dropout;
  opts.fc_dropout = config.fc_dropout;
  opts.weight_noise = config.weight_noise;
  opts.max_tokens = config.max_tokens;
  AdamOptions adam{config.learning_rate, config.beta1, config.beta2, config.epsilon};

  TrainSummary summary;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<const QAExample *> data;
    for (const auto &ex : train) data.push_back(&ex);
    std::vector<QAExample> swaps;
    if (inventory != nullptr && config.augment_count > 0) {
      AugmentReport report;
      swaps = SampleAugmented(train, *inventory, config.augment_count, rng, {}, &report);
      for (const auto &ex : swaps) data.push_back(&ex);
    }
    for (std::size_t i = data.size(); i > 1; --i) {
      std::swap(data[i - 1], data[rng.UniformInt(i)]);
    }

    double loss_sum = 0.0;
    std::size_t early = 0;
    for (std::size_t b = 0; b < data.size(); b += config.batch_size) {
      const std::size_t e = std::min(data.size(), b + config.batch_size);
      model.store().ZeroGrad();
      opts.loss_scale = 1.0 / static_cast<double>(e - b);
      for (std::size_t i = b; i < e; ++i) {
        TrainStepResult r = TrainStep(*data[i], model, table, opts, rng);
        loss_sum += r.loss;
        if (r.early_update) ++early;
      }
      AdamStep(model.store(), adam);
    }
    model.store().ZeroGrad();

    const EvalResult eval =
        EvaluateModel(model, held_out, table, config.beam_width, config.max_tokens);
    summary.epochs_run = epoch;
    log << "epoch " << epoch << " examples " << data.size() << " augmented "
        << swaps.size() << " loss " << Fixed(loss_sum / static_cast<double>(data.size()))
        << " early_updates " << early << " dev_em " << Fixed(eval.metrics.exact_match)
        << " dev_f1 " << Fixed(eval.metrics.f1) << " dev_sentence "
        << Fixed(eval.metrics.sentence_accuracy) << "\n";

    if (eval.metrics.exact_match > summary.best_dev_em) {
      summary.best_dev_em = eval.metrics.exact_match;
      summary.best_epoch = epoch;
      summary.best_checkpoint = EncodeCheckpoint(model.store());
      stale = 0;
      if (write) {
        WriteText(CheckpointPath(config), summary.best_checkpoint);
        WriteText((std::filesystem::path(config.checkpoint_dir) / "config.txt").string(),
                  FormatConfig(config));
      }
      log << "checkpoint epoch " << epoch << "\n";
    } else {
      ++stale;
    }
    if (eval.metrics.exact_match >= 100.0) {
      log << "stop perfect-dev\n";
      break;
    }
    if (stale >= config.patience) {
      log << "stop patience\n";
      break;
    }
  }
  DecodeCheckpoint(summary.best_checkpoint, model.store());
  log << "best epoch " << summary.best_epoch << " dev_em " << Fixed(summary.best_dev_em)
      << "\n";
  return summary;
}

std::string PredictionsToJson(std::span<const QAExample> dataset,
                              std::span<const Prediction> predictions) {
  if (dataset.size() != predictions.size()) {
    throw ContractError("one prediction per example expected");
  }
  json out = json::object();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Prediction &p = predictions[i];
    out[dataset[i].id] = {{"text", p.text},
                          {"prob", p.probability},
                          {"answer", {p.answer.sentence, p.answer.start, p.answer.end}}};
  }
  return out.dump(2) + "\n";
}

EvalResult EvaluatePredictions(std::span<const QAExample> dataset,
                               std::string_view predictions_json) {
  json preds;
  try {
    preds = json::parse(predictions_json);
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed predictions file: ") + e.what());
  }
  if (!preds.is_object()) throw DataError("predictions file must be a JSON object");
  EvalResult out;
  for (const auto &ex : dataset) {
    auto it = preds.find(ex.id);
    if (it == preds.end()) {
      ExampleScore s;
      s.id = ex.id;
      s.em = ExactMatch("", ex.gold_answers);
      s.f1 = F1Score("", ex.gold_answers);
      out.scores.push_back(s);
      continue;
    }
    try {
      const std::string text = it->at("text").get<std::string>();
      if (it->contains("answer")) {
        const auto &a = it->at("answer");
        const AnswerTuple t{a.at(0).get<std::size_t>(), a.at(1).get<std::size_t>(),
                            a.at(2).get<std::size_t>()};
        out.scores.push_back(ScoreExample(ex, text, t));
      } else {
        ExampleScore s;
        s.id = ex.id;
        s.prediction_text = text;
        s.em = ExactMatch(text, ex.gold_answers);
        s.f1 = F1Score(text, ex.gold_answers);
        out.scores.push_back(s);
      }
    } catch (const json::exception &e) {
      throw DataError("prediction for '" + ex.id + "' is malformed: " + e.what());
    } catch (const InputError &e) {
      throw DataError("prediction for '" + ex.id + "': " + e.what());
    }
  }
  out.metrics = Aggregate(out.scores);
  return out;
}

void CommandTrain(const RunConfig &config, std::ostream &out) {
  Validate(config);
  std::ostringstream log;
  {
    std::istringstream lines(FormatConfig(config));
    for (std::string l; std::getline(lines, l);) log << "config " << l << "\n";
  }
  const auto train = LoadExamples(config.train_path, "train", &log);
  const auto dev = config.dev_path.empty() ? std::vector<QAExample>{}
                                           : LoadExamples(config.dev_path, "dev", &log);
  if (config.vectors_path.empty()) throw DataError("no vectors_path configured");
  const WordVectorTable table = WordVectorTable::Load(config.vectors_path);
  log << "vectors " << table.size() << " dim " << table.dim() << "\n";
  std::optional<TypeInventory> inventory;
  if (config.augment_count > 0 && !config.kb_path.empty()) {
    std::vector<std::string> warnings;
    inventory = TypeInventory::Load(config.kb_path, &warnings);
    for (const auto &w : warnings) log << "warning " << w << "\n";
    log << "inventory " << inventory->Stats().ToJson() << "\n";
  }
  out << log.str();
  GnrModel model(config.dims(), config.seed);
  std::ostringstream epochs;
  struct Tee : std::streambuf {
    std::streambuf *a;
    std::streambuf *b;
    int overflow(int c) override {
      if (c == EOF) return 0;
      a->sputc(static_cast<char>(c));
      b->sputc(static_cast<char>(c));
      return c;
    }
  } tee;
  tee.a = out.rdbuf();
  tee.b = epochs.rdbuf();
  std::ostream both(&tee);
  RunTraining(config, model, train, dev, table, inventory ? &*inventory : nullptr, both);
  both.flush();
  if (!config.checkpoint_dir.empty()) {
    WriteText((std::filesystem::path(config.checkpoint_dir) / "train.log").string(),
              log.str() + epochs.str());
  }
}

AugmentReport CommandAugment(const RunConfig &config, const std::string &output) {
  if (config.kb_path.empty()) throw DataError("no kb_path configured");
  const TypeInventory inventory = TypeInventory::Load(config.kb_path);
  const auto train = LoadExamples(config.train_path, "train", nullptr);
  RngStream rng = RngStream(config.seed).Fork(2);
  AugmentReport report;
  const auto swaps =
      SampleAugmented(train, inventory, config.augment_count, rng, {}, &report);
  WriteSquad(output, swaps);
  return report;
}

void CommandPredict(const RunConfig &config, const std::string &input,
                    const std::string &output) {
  Validate(config);
  const auto data = LoadExamples(input, "input", nullptr);
  std::vector<Prediction> predictions;
  if (!data.empty()) {
    if (config.vectors_path.empty()) throw DataError("no vectors_path configured");
    const WordVectorTable table = WordVectorTable::Load(config.vectors_path);
    GnrModel model(config.dims(), config.seed);
    LoadModelFromCheckpoint(config, model);
    for (const auto &ex : data) {
      predictions.push_back(Predict(ex.document, ex.question_tokens, model, table,
                                    config.beam_width, config.max_tokens));
    }
  }
  WriteText(output, PredictionsToJson(data, predictions));
}

Metrics CommandEval(const RunConfig &config, const std::string &input,
                    const std::string &predictions, const std::string &report) {
  const auto data = LoadExamples(input, "input", nullptr);
  if (data.empty()) throw DataError("cannot evaluate an empty dataset");
  EvalResult result;
  if (!predictions.empty()) {
    result = EvaluatePredictions(data, ReadFile(predictions));
  } else {
    Validate(config);
    if (config.vectors_path.empty()) throw DataError("no vectors_path configured");
    const WordVectorTable table = WordVectorTable::Load(config.vectors_path);
    GnrModel model(config.dims(), config.seed);
    LoadModelFromCheckpoint(config, model);
    result = EvaluateModel(model, data, table, config.beam_width, config.max_tokens);
  }
  if (!report.empty()) WriteText(report, RenderReport(result.scores, result.metrics));
  return result.metrics;
}

}  // namespace gnr
