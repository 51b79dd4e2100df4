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

#ifndef GNR_EMBEDDINGS_H_
#define GNR_EMBEDDINGS_H_

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gnr/tensor.h"

namespace gnr {

// Frozen word vectors. Unknown tokens map to the zero vector.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dim);

  // Text format: "token v1 ... vD" per line. The dimension comes from the
  // first line; later lines with a different count raise DataError naming
  // the line number. Repeated tokens keep their first vector.
  static WordVectorTable Parse(std::istream &in);
  static WordVectorTable Load(const std::string &path);

  // Returns false when the token was already present.
  bool Add(const std::string &token, std::vector<double> vector);

  bool Contains(std::string_view token) const;
  std::span<const double> Lookup(std::string_view token) const;
  // Shared constant tensor; the zero tensor for unknown tokens.
  const Tensor &Vector(std::string_view token) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Tensor> vectors_;
  Tensor zero_;
};

}  // namespace gnr

#endif  // GNR_EMBEDDINGS_H_
