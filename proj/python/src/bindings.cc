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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "gnr/dataset.h"
#include "gnr/errors.h"
#include "gnr/eval.h"
#include "gnr/model.h"
#include "gnr/pipeline.h"
#include "gnr/search.h"
#include "gnr/typeswaps.h"

namespace py = pybind11;
using namespace gnr;

namespace {

using Tuple = std::tuple<std::size_t, std::size_t, std::size_t>;
using Ends = std::vector<std::vector<std::vector<double>>>;

AnswerTuple ToAnswer(const Tuple &t) {
  return {std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}
Tuple FromAnswer(const AnswerTuple &a) { return {a.sentence, a.start, a.end}; }

Normalization ParseMode(const std::string &mode) {
  if (mode == "global") return Normalization::kGlobal;
  if (mode == "local") return Normalization::kLocal;
  throw InputError("normalization must be 'local' or 'global', got '" + mode + "'");
}

std::string StageName(Stage s) {
  switch (s) {
    case Stage::kSentenceChosen: return "sentence";
    case Stage::kStartChosen: return "start";
    case Stage::kComplete: return "end";
  }
  return "";
}

std::vector<std::vector<std::string>> SentenceTexts(const TokenizedDocument &doc) {
  std::vector<std::vector<std::string>> out;
  for (const auto &s : doc.sentences) {
    out.emplace_back();
    for (const auto &t : s) out.back().push_back(t.text);
  }
  return out;
}

py::dict ExampleDict(const QAExample &ex) {
  py::dict d;
  d["id"] = ex.id;
  d["title"] = ex.title;
  d["context"] = ex.document.text;
  d["question"] = ex.question;
  d["answer_text"] = ex.answer_text;
  d["answer"] = FromAnswer(ex.answer);
  d["gold_answers"] = ex.gold_answers;
  d["sentences"] = SentenceTexts(ex.document);
  return d;
}

py::dict Decode(const std::vector<double> &sentences,
                const std::vector<std::vector<double>> &starts, const Ends &ends,
                std::size_t width) {
  FixedScorer scorer = FixedScorer::FromValues(sentences, starts, ends);
  const Beam beam = BeamDecode(scorer, width);
  const auto probs = BeamProbabilities(beam);
  py::list candidates;
  for (std::size_t i = 0; i < beam.size(); ++i) {
    const auto &c = beam.candidates()[i];
    candidates.append(py::make_tuple(FromAnswer(c.tuple), c.score, probs[i]));
  }
  py::dict d;
  d["candidates"] = candidates;
  d["log_partition"] = BeamLogPartition(scorer, beam).item();
  d["end_scorer_calls"] = scorer.end_scorer_calls();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Globally normalized span-selection reader.";

  static py::exception<DataError> data_error(m, "DataError", PyExc_RuntimeError);
  static py::exception<NumericError> numeric_error(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError &e) {
      py::set_error(data_error, e.what());
    } catch (const NumericError &e) {
      py::set_error(numeric_error, e.what());
    } catch (const InputError &e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ShapeError &e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  // Text and data.
  m.def("tokenize", [](const std::string &text) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto &t : Tokenize(text)) out.emplace_back(t.text, t.offset);
    return out;
  }, py::arg("text"), "Tokens with their byte offsets.");
  m.def("split_sentences",
        [](const std::string &text) { return SentenceTexts(MakeDocument(text)); },
        py::arg("text"));
  m.def("make_example",
        [](const std::string &context, const std::string &question, const std::string &answer,
           std::size_t answer_start, const std::string &id) {
          return ExampleDict(MakeExample(id, "", context, question, answer, answer_start));
        },
        py::arg("context"), py::arg("question"), py::arg("answer"), py::arg("answer_start"),
        py::arg("id") = "example", "answer_start counts code points, as in SQuAD files.");
  m.def("parse_squad", [](const std::string &json_text) {
    const auto loaded = ParseSquad(json_text);
    py::list examples;
    for (const auto &ex : loaded.examples) examples.append(ExampleDict(ex));
    return py::make_tuple(examples, loaded.report.ToJson());
  }, py::arg("json_text"), "Returns (examples, ingestion report JSON).");

  // Evaluation.
  m.def("normalize_answer", &NormalizeAnswer, py::arg("text"));
  m.def("exact_match",
        [](const std::string &p, const std::vector<std::string> &golds) {
          return ExactMatch(p, golds);
        },
        py::arg("prediction"), py::arg("golds"));
  m.def("f1_score",
        [](const std::string &p, const std::vector<std::string> &golds) {
          return F1Score(p, golds);
        },
        py::arg("prediction"), py::arg("golds"));
  m.def("sentence_match",
        [](const Tuple &p, const Tuple &g) { return SentenceMatch(ToAnswer(p), ToAnswer(g)); },
        py::arg("predicted"), py::arg("gold"));

  // Search over fixed stage scores. ends[i][j] holds the end scores of
  // start j in sentence i.
  m.def("beam_decode", &Decode, py::arg("sentence_scores"), py::arg("start_scores"),
        py::arg("end_scores"), py::arg("width"));
  m.def("exact_log_partition",
        [](const std::vector<double> &s, const std::vector<std::vector<double>> &st,
           const Ends &e) {
          FixedScorer scorer = FixedScorer::FromValues(s, st, e);
          return ExactLogPartition(scorer).item();
        },
        py::arg("sentence_scores"), py::arg("start_scores"), py::arg("end_scores"));
  m.def("local_log_prob",
        [](const std::vector<double> &s, const std::vector<std::vector<double>> &st,
           const Ends &e, const Tuple &answer) {
          FixedScorer scorer = FixedScorer::FromValues(s, st, e);
          return LocalLogProb(scorer, ToAnswer(answer)).item();
        },
        py::arg("sentence_scores"), py::arg("start_scores"), py::arg("end_scores"),
        py::arg("answer"));
  m.def("search_loss",
        [](const std::vector<double> &s, const std::vector<std::vector<double>> &st,
           const Ends &e, const Tuple &gold, std::size_t width, const std::string &mode) {
          FixedScorer scorer = FixedScorer::FromValues(s, st, e);
          const auto r = SearchLoss(scorer, ToAnswer(gold), width, ParseMode(mode));
          std::optional<std::string> early;
          if (r.early_update) early = StageName(*r.early_update);
          return py::make_tuple(r.loss.item(), early);
        },
        py::arg("sentence_scores"), py::arg("start_scores"), py::arg("end_scores"),
        py::arg("gold"), py::arg("width"), py::arg("normalization") = "global",
        "Returns (loss, stage of the early update or None).");

  // Type swaps.
  py::class_<TypeInventory>(m, "TypeInventory")
      .def(py::init<>())
      .def_static("parse", [](const std::string &text) {
        std::istringstream in(text);
        std::vector<std::string> warnings;
        TypeInventory inv = TypeInventory::Parse(in, &warnings);
        return py::make_tuple(std::move(inv), warnings);
      }, py::arg("text"), "Returns (inventory, warnings).")
      .def("add", &TypeInventory::Add, py::arg("surface"), py::arg("type"))
      .def("type_of", &TypeInventory::TypeOf, py::arg("surface"))
      .def("surfaces", &TypeInventory::Surfaces, py::arg("type"))
      .def("types", &TypeInventory::Types)
      .def("stats", [](const TypeInventory &inv) { return inv.Stats().ToJson(); });
  m.def("number_type", [](const std::string &text) -> std::optional<std::string> {
    const auto kind = AssignNumberType(text);
    if (!kind) return std::nullopt;
    return NumberTypeId(*kind);
  }, py::arg("text"));
  m.def("generate_swap",
        [](const std::string &context, const std::string &question, const std::string &answer,
           std::size_t answer_start, const TypeInventory &inventory, std::uint64_t seed) {
          const QAExample ex = MakeExample("example", "", context, question, answer, answer_start);
          RngStream rng(seed);
          const SwapOutcome out = GenerateSwap(ex, inventory, rng);
          py::dict d;
          d["rejection"] = out.rejection;
          d["replacements"] = out.plan.replacements;
          d["example"] = out.example ? py::object(ExampleDict(*out.example)) : py::none();
          return d;
        },
        py::arg("context"), py::arg("question"), py::arg("answer"), py::arg("answer_start"),
        py::arg("inventory"), py::arg("seed") = 1);

  // Configuration and commands.
  m.def("config_keys", &ConfigKeys);
  m.def("parse_config", [](const std::string &text) {
    const RunConfig c = ParseConfig(text);
    py::dict d;
    for (const auto &key : ConfigKeys()) d[py::str(key)] = GetConfigValue(c, key);
    return d;
  }, py::arg("text"), "Effective values of every key, as strings.");
  m.def("format_config", [](const py::dict &values) {
    RunConfig c;
    for (const auto &[k, v] : values) SetConfigValue(c, std::string(py::str(k)), std::string(py::str(v)));
    return FormatConfig(c);
  }, py::arg("values"));
  m.def("train", [](const std::string &config_text) {
    std::ostringstream out;
    CommandTrain(ParseConfig(config_text), out);
    return out.str();
  }, py::arg("config_text"), "Runs training; returns the console log.");
  m.def("augment", [](const std::string &config_text, const std::string &output) {
    return CommandAugment(ParseConfig(config_text), output).ToJson();
  }, py::arg("config_text"), py::arg("output"));
  m.def("predict", [](const std::string &config_text, const std::string &input,
                      const std::string &output) {
    CommandPredict(ParseConfig(config_text), input, output);
  }, py::arg("config_text"), py::arg("input"), py::arg("output"));
  m.def("evaluate", [](const std::string &config_text, const std::string &input,
                       const std::string &predictions, const std::string &report) {
    const Metrics mt = CommandEval(ParseConfig(config_text), input, predictions, report);
    py::dict d;
    d["exact_match"] = mt.exact_match;
    d["f1"] = mt.f1;
    d["sentence"] = mt.sentence_accuracy;
    d["count"] = mt.count;
    return d;
  }, py::arg("config_text"), py::arg("input"), py::arg("predictions"), py::arg("report"));
}
