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

// Define-by-run reverse-mode differentiation over small dense arrays.
//
// A Tensor is a cheap handle to a graph node. Every operation below
// allocates a fresh node that remembers its inputs; calling backward() on a
// scalar result walks the graph in reverse topological order and
// accumulates gradients into every node that requires them. Parameters are
// long-lived leaf nodes owned by a ParameterStore, so their gradients add up
// across all graphs built between two optimizer steps.

#ifndef GNR_TENSOR_H_
#define GNR_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gnr {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape &shape);
std::string ShapeString(const Shape &shape);

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty unless requires_grad
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node &)> backward;
};

class Tensor {
 public:
  Tensor() = default;

  // Leaf without gradient.
  static Tensor Constant(Shape shape, std::vector<double> values);
  static Tensor Scalar(double value);
  static Tensor Zeros(Shape shape);
  // Leaf with gradient storage; used for learned parameters.
  static Tensor Parameter(Shape shape, std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  const Shape &shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return node_->grad; }
  double operator[](std::size_t i) const { return node_->value[i]; }
  // Value of a one-element tensor.
  double item() const;

  // Seeds d(this)/d(this) = 1 and back-propagates. Requires one element.
  void Backward() const;
  void ZeroGrad();

  // Internal: used by operation implementations.
  static Tensor FromNode(std::shared_ptr<Node> node) {
    Tensor t;
    t.node_ = std::move(node);
    return t;
  }
  const std::shared_ptr<Node> &node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Matrix product of a [m x k] and b [k x n]; b may also be a rank-1 [k]
// vector, giving a rank-1 [m] result.
Tensor MatMul(const Tensor &a, const Tensor &b);
// w [m x k] * x [k] + bias [m].
Tensor Affine(const Tensor &w, const Tensor &x, const Tensor &bias);

Tensor Add(const Tensor &a, const Tensor &b);
Tensor Sub(const Tensor &a, const Tensor &b);
Tensor Mul(const Tensor &a, const Tensor &b);
Tensor Scale(const Tensor &a, double factor);
// Elementwise product with a constant mask of the same size.
Tensor MaskMul(const Tensor &a, std::vector<double> mask);

Tensor Sigmoid(const Tensor &a);
Tensor Tanh(const Tensor &a);
Tensor Relu(const Tensor &a);

// Flattening concatenation into a rank-1 tensor.
Tensor Concat(std::span<const Tensor> parts);
Tensor Concat(std::initializer_list<Tensor> parts);
Tensor Slice(const Tensor &a, std::size_t offset, std::size_t length);
// Single element as a one-element tensor.
Tensor Pick(const Tensor &a, std::size_t index);

Tensor Sum(const Tensor &a);
Tensor Dot(const Tensor &a, const Tensor &b);
// sum_i weights[i] * vectors[i]; vectors must share one size.
Tensor WeightedSum(const Tensor &weights, std::span<const Tensor> vectors);

Tensor Softmax(const Tensor &scores);
Tensor LogSumExp(const Tensor &scores);

}  // namespace gnr

#endif  // GNR_TENSOR_H_
