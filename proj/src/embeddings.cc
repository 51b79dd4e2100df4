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

#include "gnr/embeddings.h"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "gnr/errors.h"

namespace gnr {

WordVectorTable::WordVectorTable(std::size_t dim)
    : dim_(dim), zero_(Tensor::Zeros({dim})) {
  if (dim == 0) throw InputError("word vectors need a positive dimension");
}

bool WordVectorTable::Add(const std::string &token, std::vector<double> vector) {
  if (vector.size() != dim_) {
    throw DataError("vector for '" + token + "' has " +
                    std::to_string(vector.size()) + " values, expected " +
                    std::to_string(dim_));
  }
  if (index_.contains(token)) return false;
  index_.emplace(token, vectors_.size());
  vectors_.push_back(Tensor::Constant({dim_}, std::move(vector)));
  return true;
}

bool WordVectorTable::Contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

const Tensor &WordVectorTable::Vector(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? zero_ : vectors_[it->second];
}

std::span<const double> WordVectorTable::Lookup(std::string_view token) const {
  return Vector(token).values();
}

WordVectorTable WordVectorTable::Parse(std::istream &in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<WordVectorTable> table;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t space = line.find(' ');
    if (space == std::string::npos || space == 0) {
      throw DataError("word vectors line " + std::to_string(line_no) +
                      ": expected 'token v1 ... vD'");
    }
    std::string token = line.substr(0, space);
    std::vector<double> values;
    const char *p = line.c_str() + space;
    const char *end = line.c_str() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p >= end) break;
      char *next = nullptr;
      errno = 0;
      const double v = std::strtod(p, &next);
      if (next == p || errno == ERANGE) {
        throw DataError("word vectors line " + std::to_string(line_no) +
                        ": bad number");
      }
      values.push_back(v);
      p = next;
    }
    if (!table) {
      if (values.empty()) {
        throw DataError("word vectors line " + std::to_string(line_no) +
                        ": no values");
      }
      table.emplace(values.size());
    } else if (values.size() != table->dim()) {
      throw DataError("word vectors line " + std::to_string(line_no) + ": " +
                      std::to_string(values.size()) + " values, expected " +
                      std::to_string(table->dim()));
    }
    table->Add(token, std::move(values));
  }
  if (!table) throw DataError("word vectors file is empty");
  return std::move(*table);
}

WordVectorTable WordVectorTable::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read word vectors '" + path + "'");
  return Parse(in);
}

}  // namespace gnr
