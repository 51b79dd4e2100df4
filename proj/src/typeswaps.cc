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

#include "gnr/typeswaps.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "json.hpp"
#include "gnr/errors.h"
#include "gnr/unicode.h"

namespace gnr {
namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};
constexpr std::array<std::string_view, 7> kWeekdays = {
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};
constexpr std::array<std::string_view, 20> kOrdinals = {
    "first",       "second",     "third",      "fourth",     "fifth",
    "sixth",       "seventh",    "eighth",     "ninth",      "tenth",
    "eleventh",    "twelfth",    "thirteenth", "fourteenth", "fifteenth",
    "sixteenth",   "seventeenth", "eighteenth", "nineteenth", "twentieth"};
constexpr std::array<std::string_view, 40> kUnits = {
    "%",          "percent",   "km",        "kilometres", "kilometers", "kilometre",
    "kilometer",  "m",         "metres",    "meters",     "metre",      "meter",
    "cm",         "mm",        "miles",     "mile",       "mi",         "feet",
    "foot",       "ft",        "inches",    "inch",       "yards",      "kg",
    "kilograms",  "g",         "grams",     "tonnes",     "tons",       "pounds",
    "lb",         "years",     "months",    "weeks",      "days",       "hours",
    "minutes",    "seconds",   "people",    "acres"};

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

bool AllDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), IsDigit);
}

// 1,234,567
bool IsCommaGrouped(std::string_view s) {
  const std::size_t comma = s.find(',');
  if (comma == std::string_view::npos || comma == 0 || comma > 3) return false;
  if (!AllDigits(s.substr(0, comma))) return false;
  for (std::size_t pos = comma; pos < s.size(); pos += 4) {
    if (s[pos] != ',' || pos + 4 > s.size() || !AllDigits(s.substr(pos + 1, 3))) {
      return false;
    }
  }
  return true;
}

bool IsIntegerWord(std::string_view s) { return AllDigits(s) || IsCommaGrouped(s); }

bool IsDecimalWord(std::string_view s) {
  const std::size_t dot = s.find('.');
  if (dot == std::string_view::npos) return false;
  return IsIntegerWord(s.substr(0, dot)) && AllDigits(s.substr(dot + 1));
}

bool IsYearWord(std::string_view s) {
  return s.size() == 4 && AllDigits(s) && (s[0] == '1' || s[0] == '2');
}

std::string LowerInitial(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'A' && out[0] <= 'Z') out[0] = static_cast<char>(out[0] - 'A' + 'a');
  return out;
}

template <std::size_t N>
std::optional<std::size_t> IndexOf(const std::array<std::string_view, N> &list,
                                   std::string_view word) {
  for (std::size_t i = 0; i < N; ++i) {
    if (list[i] == word) return i;
  }
  return std::nullopt;
}

bool IsNumericOrdinal(std::string_view s) {
  if (s.size() < 3) return false;
  const std::string_view suffix = s.substr(s.size() - 2);
  if (suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th") return false;
  return AllDigits(s.substr(0, s.size() - 2));
}

bool IsOrdinalWord(std::string_view s) {
  return IndexOf(kOrdinals, LowerInitial(s)).has_value() || IsNumericOrdinal(s);
}

bool IsUnit(std::string_view s) { return IndexOf(kUnits, s).has_value(); }

std::size_t CountDigits(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), IsDigit));
}

std::string RandomDigits(std::size_t n, bool nonzero_lead, RngStream &rng) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool lead = i == 0 && nonzero_lead && n > 1;
    out.push_back(static_cast<char>(
        '0' + (lead ? 1 + rng.UniformInt(9) : rng.UniformInt(10))));
  }
  return out;
}

std::string GroupThousands(const std::string &digits) {
  std::string out;
  const std::size_t n = digits.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string SampleInteger(std::string_view s, RngStream &rng) {
  std::string digits = RandomDigits(CountDigits(s), true, rng);
  return IsCommaGrouped(s) ? GroupThousands(digits) : digits;
}

std::string SampleDecimal(std::string_view s, RngStream &rng) {
  const std::size_t dot = s.find('.');
  return SampleInteger(s.substr(0, dot), rng) + "." +
         RandomDigits(s.size() - dot - 1, false, rng);
}

std::string OrdinalSuffix(std::uint64_t n) {
  if (n % 100 >= 11 && n % 100 <= 13) return "th";
  switch (n % 10) {
    case 1: return "st";
    case 2: return "nd";
    case 3: return "rd";
    default: return "th";
  }
}

template <std::size_t N>
std::string_view PickOther(const std::array<std::string_view, N> &list,
                           std::size_t original, RngStream &rng) {
  std::size_t k = rng.UniformInt(N - 1);
  if (k >= original) ++k;
  return list[k];
}

std::string SampleOnce(std::string_view s, NumberKind kind, RngStream &rng) {
  switch (kind) {
    case NumberKind::kYear:
      return std::to_string(1000 + rng.UniformInt(2000));
    case NumberKind::kInteger:
      return SampleInteger(s, rng);
    case NumberKind::kDecimal:
      return SampleDecimal(s, rng);
    case NumberKind::kMonth:
      return std::string(PickOther(kMonths, *IndexOf(kMonths, s), rng));
    case NumberKind::kWeekday:
      return std::string(PickOther(kWeekdays, *IndexOf(kWeekdays, s), rng));
    case NumberKind::kOrdinal: {
      if (IsNumericOrdinal(s)) {
        const std::string digits = RandomDigits(s.size() - 2, true, rng);
        std::uint64_t n = std::stoull(digits);
        if (n == 0) n = 1 + rng.UniformInt(9);
        return std::to_string(n) + OrdinalSuffix(n);
      }
      const std::string lower = LowerInitial(s);
      std::string out(PickOther(kOrdinals, *IndexOf(kOrdinals, lower), rng));
      if (lower != s) out[0] = static_cast<char>(out[0] - 'a' + 'A');
      return out;
    }
    case NumberKind::kQuantity: {
      std::size_t cut = 0;
      while (cut < s.size() && !IsSpace(static_cast<unsigned char>(s[cut]))) ++cut;
      const std::string_view number = s.substr(0, cut);
      const std::string rest(s.substr(cut));
      return (IsDecimalWord(number) ? SampleDecimal(number, rng)
                                    : SampleInteger(number, rng)) +
             rest;
    }
  }
  throw ContractError("unknown number kind");
}

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

void ExtractFrom(std::span<const Token> tokens, std::string_view source,
                 const TypeInventory &inventory, bool in_question,
                 std::size_t sentence, std::vector<EntityOccurrence> &out) {
  const std::size_t max_n = std::max<std::size_t>(inventory.max_surface_tokens(), 2);
  std::size_t p = 0;
  while (p < tokens.size()) {
    std::size_t taken = 0;
    for (std::size_t n = std::min(max_n, tokens.size() - p); n >= 1; --n) {
      const std::size_t b = tokens[p].offset;
      const std::size_t e = tokens[p + n - 1].end();
      const std::string_view surface = source.substr(b, e - b);
      EntityOccurrence occ;
      occ.in_question = in_question;
      occ.sentence = sentence;
      occ.start = p;
      occ.end = p + n - 1;
      occ.byte_begin = b;
      occ.byte_end = e;
      occ.surface = std::string(surface);
      if (auto type = inventory.TypeOf(surface)) {
        occ.type = *type;
      } else if (n <= 2) {
        auto kind = AssignNumberType(tokens.subspan(p, n));
        if (!kind) continue;
        occ.number = kind;
        occ.type = NumberTypeId(*kind);
      } else {
        continue;
      }
      out.push_back(std::move(occ));
      taken = n;
      break;
    }
    p += taken == 0 ? 1 : taken;
  }
}

struct Edit {
  std::size_t begin;
  std::size_t end;
  const std::string *replacement;
};

std::string Rewrite(std::string_view text, const std::vector<Edit> &edits) {
  std::string out;
  std::size_t pos = 0;
  for (const Edit &e : edits) {
    out.append(text.substr(pos, e.begin - pos));
    out += *e.replacement;
    pos = e.end;
  }
  out.append(text.substr(pos));
  return out;
}

std::vector<Edit> EditsFor(std::span<const EntityOccurrence> occurrences,
                           const SwapPlan &plan, bool question) {
  std::vector<Edit> edits;
  for (const auto &occ : occurrences) {
    if (occ.in_question != question) continue;
    auto it = plan.replacements.find(occ.surface);
    if (it == plan.replacements.end()) continue;
    edits.push_back({occ.byte_begin, occ.byte_end, &it->second});
  }
  std::sort(edits.begin(), edits.end(),
            [](const Edit &a, const Edit &b) { return a.begin < b.begin; });
  return edits;
}

}  // namespace

std::string_view NumberKindName(NumberKind kind) {
  switch (kind) {
    case NumberKind::kYear: return "year";
    case NumberKind::kInteger: return "integer";
    case NumberKind::kDecimal: return "decimal";
    case NumberKind::kMonth: return "month";
    case NumberKind::kWeekday: return "weekday";
    case NumberKind::kOrdinal: return "ordinal";
    case NumberKind::kQuantity: return "quantity";
  }
  return "unknown";
}

std::string NumberTypeId(NumberKind kind) {
  return "number/" + std::string(NumberKindName(kind));
}

namespace {

std::optional<NumberKind> WordNumberType(std::string_view w) {
  if (IsYearWord(w)) return NumberKind::kYear;
  if (IsIntegerWord(w)) return NumberKind::kInteger;
  if (IsDecimalWord(w)) return NumberKind::kDecimal;
  if (IndexOf(kMonths, w)) return NumberKind::kMonth;
  if (IndexOf(kWeekdays, w)) return NumberKind::kWeekday;
  if (IsOrdinalWord(w)) return NumberKind::kOrdinal;
  return std::nullopt;
}

}  // namespace

std::optional<NumberKind> AssignNumberType(std::span<const Token> span) {
  if (span.size() == 1) return WordNumberType(span[0].text);
  if (span.size() == 2 && IsUnit(span[1].text) &&
      (IsIntegerWord(span[0].text) || IsDecimalWord(span[0].text))) {
    return NumberKind::kQuantity;
  }
  return std::nullopt;
}

std::optional<NumberKind> AssignNumberType(std::string_view text) {
  const auto tokens = Tokenize(text);
  return AssignNumberType(std::span<const Token>(tokens));
}

std::string SampleNumber(std::string_view surface, NumberKind kind, RngStream &rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::string out = SampleOnce(surface, kind, rng);
    if (out != surface) return out;
  }
  throw NumericError("could not sample a replacement for '" + std::string(surface) + "'");
}

std::string InventoryStats::ToJson() const {
  nlohmann::json j = {{"types", types},
                      {"variants", variants},
                      {"average_variants", average_variants}};
  return j.dump();
}

bool TypeInventory::Add(const std::string &surface, const std::string &type) {
  if (surface.empty() || type.empty()) {
    throw InputError("inventory entries need a surface and a type");
  }
  if (type_of_.contains(surface)) return false;
  type_of_.emplace(surface, type);
  surfaces_[type].push_back(surface);
  max_tokens_ = std::max(max_tokens_, Tokenize(surface).size());
  return true;
}

std::optional<std::string> TypeInventory::TypeOf(std::string_view surface) const {
  auto it = type_of_.find(std::string(surface));
  if (it == type_of_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string> &TypeInventory::Surfaces(std::string_view type) const {
  auto it = surfaces_.find(type);
  if (it == surfaces_.end()) {
    throw InputError("unknown type '" + std::string(type) + "'");
  }
  return it->second;
}

std::vector<std::string> TypeInventory::Types() const {
  std::vector<std::string> out;
  for (const auto &[type, list] : surfaces_) out.push_back(type);
  return out;
}

InventoryStats TypeInventory::Stats() const {
  InventoryStats s;
  s.types = surfaces_.size();
  s.variants = type_of_.size();
  s.average_variants =
      s.types == 0 ? 0.0 : static_cast<double>(s.variants) / static_cast<double>(s.types);
  return s;
}

TypeInventory TypeInventory::Parse(std::istream &in, std::vector<std::string> *warnings) {
  TypeInventory inv;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw DataError("KB line " + std::to_string(number) +
                      ": expected 'surface<TAB>type'");
    }
    const std::string surface = Trim(line.substr(0, tab));
    const std::string type = Trim(line.substr(tab + 1));
    if (surface.empty() || type.empty()) {
      throw DataError("KB line " + std::to_string(number) + ": empty surface or type");
    }
    auto existing = inv.TypeOf(surface);
    if (existing) {
      if (*existing != type && warnings) {
        warnings->push_back("KB line " + std::to_string(number) + ": '" + surface +
                            "' already registered as '" + *existing +
                            "', ignoring type '" + type + "'");
      }
      continue;
    }
    inv.Add(surface, type);
  }
  return inv;
}

TypeInventory TypeInventory::Load(const std::string &path,
                                  std::vector<std::string> *warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read KB '" + path + "'");
  return Parse(in, warnings);
}

std::vector<EntityOccurrence> ExtractEntities(const QAExample &example,
                                              const TypeInventory &inventory) {
  std::vector<EntityOccurrence> out;
  const auto &doc = example.document;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    ExtractFrom(doc.sentences[i], doc.text, inventory, false, i, out);
  }
  ExtractFrom(example.question_tokens, example.question, inventory, true, 0, out);
  return out;
}

SwapPlan DrawPlan(std::span<const EntityOccurrence> occurrences,
                  const TypeInventory &inventory, RngStream &rng) {
  SwapPlan plan;
  std::set<std::string> seen;
  for (const auto &occ : occurrences) {
    if (!seen.insert(occ.surface).second) continue;
    if (occ.number) {
      plan.replacements[occ.surface] = SampleNumber(occ.surface, *occ.number, rng);
      plan.types[occ.surface] = occ.type;
      continue;
    }
    const auto &variants = inventory.Surfaces(occ.type);
    if (variants.size() < 2) continue;
    const auto self = std::find(variants.begin(), variants.end(), occ.surface);
    std::size_t k = rng.UniformInt(variants.size() - 1);
    if (k >= static_cast<std::size_t>(self - variants.begin())) ++k;
    plan.replacements[occ.surface] = variants[k];
    plan.types[occ.surface] = occ.type;
  }
  return plan;
}

RewrittenText ApplyPlan(const QAExample &example,
                        std::span<const EntityOccurrence> occurrences,
                        const SwapPlan &plan) {
  return {Rewrite(example.document.text, EditsFor(occurrences, plan, false)),
          Rewrite(example.question, EditsFor(occurrences, plan, true))};
}

SwapOutcome GenerateSwap(const QAExample &example, const TypeInventory &inventory,
                         RngStream &rng) {
  const auto occurrences = ExtractEntities(example, inventory);
  return GenerateSwap(example, occurrences, inventory, rng);
}

SwapOutcome GenerateSwap(const QAExample &example,
                         std::span<const EntityOccurrence> occurrences,
                         const TypeInventory &inventory, RngStream &rng) {
  SwapOutcome out;
  if (occurrences.empty()) {
    out.rejection = "no-entities";
    return out;
  }
  out.plan = DrawPlan(occurrences, inventory, rng);
  if (out.plan.replacements.empty()) {
    out.rejection = "no-replacement";
    return out;
  }

  const AlignedSpan gold =
      AlignAnswerAtByte(example.document, example.answer_text, example.answer_start);
  const auto edits = EditsFor(occurrences, out.plan, false);
  std::ptrdiff_t shift_begin = 0;
  std::ptrdiff_t shift_end = 0;
  bool answer_changed = false;
  for (const Edit &e : edits) {
    const bool overlaps = e.begin < gold.byte_end && e.end > gold.byte_begin;
    const bool inside = e.begin >= gold.byte_begin && e.end <= gold.byte_end;
    if (overlaps && !inside) {
      out.rejection = "answer-boundary";
      return out;
    }
    const auto delta = static_cast<std::ptrdiff_t>(e.replacement->size()) -
                       static_cast<std::ptrdiff_t>(e.end - e.begin);
    if (e.end <= gold.byte_begin) shift_begin += delta;
    if (e.end <= gold.byte_end) shift_end += delta;
    answer_changed = answer_changed || inside;
  }

  RewrittenText text = ApplyPlan(example, occurrences, out.plan);
  if (!answer_changed && text.question == example.question) {
    out.rejection = "no-mutation";
    return out;
  }
  const std::size_t begin = gold.byte_begin + shift_begin;
  const std::size_t end = gold.byte_end + shift_end;
  std::string answer = answer_changed ? text.context.substr(begin, end - begin)
                                      : example.answer_text;
  try {
    const std::size_t char_start = ByteToCodepointOffset(text.context, begin);
    out.example = MakeExample(example.id + "/swap", example.title,
                              std::move(text.context), std::move(text.question),
                              std::move(answer), char_start);
  } catch (const DataError &) {
    out.rejection = "alignment-lost";
  }
  return out;
}

double LogDocumentCount(std::span<const EntityOccurrence> occurrences,
                        const TypeInventory &inventory) {
  std::set<std::string> seen;
  double total = 0.0;
  for (const auto &occ : occurrences) {
    if (occ.number || !seen.insert(occ.surface).second) continue;
    total += std::log(static_cast<double>(inventory.Surfaces(occ.type).size()));
  }
  return total;
}

std::string AugmentReport::ToJson() const {
  nlohmann::json j;
  j["accepted"] = accepted;
  j["rejected"] = nlohmann::json::object();
  for (const auto &[reason, n] : rejected) j["rejected"][reason] = n;
  return j.dump();
}

std::vector<QAExample> SampleAugmented(std::span<const QAExample> dataset,
                                       const TypeInventory &inventory,
                                       std::size_t count, RngStream &rng,
                                       const AugmentOptions &options,
                                       AugmentReport *report) {
  std::vector<QAExample> out;
  if (count == 0) return out;
  if (dataset.empty()) throw DataError("cannot augment an empty dataset");
  std::vector<std::optional<std::vector<EntityOccurrence>>> cache(dataset.size());
  std::size_t failures = 0;
  AugmentReport local;
  AugmentReport &rep = report ? *report : local;
  while (out.size() < count) {
    const std::size_t idx = rng.UniformInt(dataset.size());
    auto &occ = cache[idx];
    if (!occ) occ = ExtractEntities(dataset[idx], inventory);
    bool accepted = false;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, options.retries_per_candidate);
         ++r) {
      SwapOutcome s = GenerateSwap(dataset[idx], *occ, inventory, rng);
      if (s.example) {
        s.example->id += std::to_string(out.size());
        out.push_back(std::move(*s.example));
        ++rep.accepted;
        accepted = true;
        break;
      }
      ++rep.rejected[s.rejection];
      // These two do not depend on the draw.
      if (s.rejection == "no-entities" || s.rejection == "no-replacement") break;
    }
    if (accepted) {
      failures = 0;
    } else if (++failures >= options.failure_budget) {
      throw DataError("type swaps: " + std::to_string(failures) +
                      " candidates in a row were rejected; " +
                      "no example seems to admit a mutating swap");
    }
  }
  return out;
}

}  // namespace gnr
