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

// Data augmentation by swapping typed entities for other surfaces of the
// same type.

#ifndef GNR_TYPESWAPS_H_
#define GNR_TYPESWAPS_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gnr/dataset.h"
#include "gnr/nn.h"
#include "gnr/text.h"

namespace gnr {

enum class NumberKind {
  kYear,
  kInteger,
  kDecimal,
  kMonth,
  kWeekday,
  kOrdinal,
  kQuantity,
};

std::string_view NumberKindName(NumberKind kind);

// Classifies a one- or two-token span. Two-token spans are only ever
// quantities ("12 km").
std::optional<NumberKind> AssignNumberType(std::span<const Token> span);
// Same, on a tokenized string.
std::optional<NumberKind> AssignNumberType(std::string_view text);

// Type id under which number occurrences are recorded, e.g. "number/year".
std::string NumberTypeId(NumberKind kind);

struct InventoryStats {
  std::size_t types = 0;
  std::size_t variants = 0;
  double average_variants = 0.0;

  std::string ToJson() const;
};

class TypeInventory {
 public:
  // Returns false, leaving the inventory unchanged, when the surface is
  // already registered. Throws InputError on empty fields.
  bool Add(const std::string &surface, const std::string &type);

  std::optional<std::string> TypeOf(std::string_view surface) const;
  // Surfaces in registration order. Throws InputError for unknown types.
  const std::vector<std::string> &Surfaces(std::string_view type) const;
  std::vector<std::string> Types() const;
  bool empty() const { return type_of_.empty(); }
  // Longest surface, in tokens.
  std::size_t max_surface_tokens() const { return max_tokens_; }
  InventoryStats Stats() const;

  // "surface<TAB>type" per line, '#' starts a comment line. Duplicate
  // surfaces under a second type are skipped with a warning.
  static TypeInventory Parse(std::istream &in,
                             std::vector<std::string> *warnings = nullptr);
  static TypeInventory Load(const std::string &path,
                            std::vector<std::string> *warnings = nullptr);

 private:
  std::unordered_map<std::string, std::string> type_of_;
  std::map<std::string, std::vector<std::string>, std::less<>> surfaces_;
  std::size_t max_tokens_ = 0;
};

struct EntityOccurrence {
  bool in_question = false;
  std::size_t sentence = 0;  // unused for question occurrences
  std::size_t start = 0;     // token span, inclusive
  std::size_t end = 0;
  std::size_t byte_begin = 0;  // into the context or the question text
  std::size_t byte_end = 0;
  std::string surface;
  std::string type;
  std::optional<NumberKind> number;
};

// Greedy longest match, left to right, within each sentence and within the
// question. At equal length an inventory surface beats a number rule.
std::vector<EntityOccurrence> ExtractEntities(const QAExample &example,
                                              const TypeInventory &inventory);

// original surface -> replacement surface
struct SwapPlan {
  std::map<std::string, std::string> replacements;
  std::map<std::string, std::string> types;  // original surface -> type id
};

// A fresh value of the same kind, never equal to the original.
std::string SampleNumber(std::string_view surface, NumberKind kind, RngStream &rng);

// One uniformly drawn replacement per distinct surface. Surfaces whose type
// has no other variant are left out of the plan.
SwapPlan DrawPlan(std::span<const EntityOccurrence> occurrences,
                  const TypeInventory &inventory, RngStream &rng);

struct RewrittenText {
  std::string context;
  std::string question;
};

RewrittenText ApplyPlan(const QAExample &example,
                        std::span<const EntityOccurrence> occurrences,
                        const SwapPlan &plan);

struct SwapOutcome {
  std::optional<QAExample> example;
  // Empty on success. Otherwise one of "no-entities", "no-replacement",
  // "answer-boundary", "alignment-lost", "no-mutation".
  std::string rejection;
  SwapPlan plan;
};

SwapOutcome GenerateSwap(const QAExample &example, const TypeInventory &inventory,
                         RngStream &rng);
// Same, with entities extracted up front.
SwapOutcome GenerateSwap(const QAExample &example,
                         std::span<const EntityOccurrence> occurrences,
                         const TypeInventory &inventory, RngStream &rng);

// log of the number of documents reachable by assigning every distinct
// inventory-typed surface any variant of its type (the original included).
double LogDocumentCount(std::span<const EntityOccurrence> occurrences,
                        const TypeInventory &inventory);

struct AugmentOptions {
  std::size_t retries_per_candidate = 4;
  // Consecutive rejected candidates tolerated before giving up.
  std::size_t failure_budget = 1000;
};

struct AugmentReport {
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> rejected;

  std::string ToJson() const;
};

// Draws originals uniformly until `count` swaps are accepted. Throws
// DataError when the failure budget runs out.
std::vector<QAExample> SampleAugmented(std::span<const QAExample> dataset,
                                       const TypeInventory &inventory,
                                       std::size_t count, RngStream &rng,
                                       const AugmentOptions &options = {},
                                       AugmentReport *report = nullptr);

}  // namespace gnr

#endif  // GNR_TYPESWAPS_H_
