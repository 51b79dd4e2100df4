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

#ifndef GNR_ERRORS_H_
#define GNR_ERRORS_H_

#include <stdexcept>
#include <string>

namespace gnr {

// Tensor shapes that do not fit an operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller supplied an argument outside the operation's domain.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent files and examples. The CLI maps these to exit
// code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite losses and similar. The CLI maps these to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A search-level precondition was broken by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gnr

#endif  // GNR_ERRORS_H_
