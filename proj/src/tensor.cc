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

#include "gnr/tensor.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "gnr/errors.h"

namespace gnr {

std::size_t NumElements(const Shape &shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeString(const Shape &shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {

std::shared_ptr<Node> MakeLeaf(Shape shape, std::vector<double> values,
                               bool requires_grad) {
  if (values.size() != NumElements(shape)) {
    throw ShapeError("value count " + std::to_string(values.size()) +
                     " does not match shape " + ShapeString(shape));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  if (requires_grad) node->grad.assign(node->value.size(), 0.0);
  return node;
}

// Creates an interior node. The backward closure is dropped when no input
// needs a gradient, which keeps constant subgraphs free.
Tensor MakeResult(Shape shape, std::vector<double> values,
                  std::vector<std::shared_ptr<Node>> inputs,
                  std::function<void(Node &)> backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  bool needs = false;
  for (const auto &in : inputs) needs = needs || in->requires_grad;
  if (needs) {
    node->requires_grad = true;
    node->grad.assign(node->value.size(), 0.0);
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Tensor::FromNode(std::move(node));
}

void RequireSameSize(const Tensor &a, const Tensor &b, const char *op) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(op) + ": size mismatch " +
                     ShapeString(a.shape()) + " vs " + ShapeString(b.shape()));
  }
}

Tensor Unary(const Tensor &a, const std::function<double(double)> &f,
             std::function<void(Node &)> backward) {
  std::vector<double> out(a.size());
  const auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return MakeResult(a.shape(), std::move(out), {a.node()}, std::move(backward));
}

}  // namespace

Tensor Tensor::Constant(Shape shape, std::vector<double> values) {
  return FromNode(MakeLeaf(std::move(shape), std::move(values), false));
}

Tensor Tensor::Scalar(double value) { return Constant({}, {value}); }

Tensor Tensor::Zeros(Shape shape) {
  std::vector<double> v(NumElements(shape), 0.0);
  return Constant(std::move(shape), std::move(v));
}

Tensor Tensor::Parameter(Shape shape, std::vector<double> values) {
  return FromNode(MakeLeaf(std::move(shape), std::move(values), true));
}

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeError("item() on tensor of shape " + ShapeString(shape()));
  }
  return node_->value[0];
}

void Tensor::ZeroGrad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::Backward() const {
  if (size() != 1) {
    throw ShapeError("backward() needs a one-element loss, got " +
                     ShapeString(shape()));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS; leaves (no backward) are not recorded.
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node *child = node->inputs[next++].get();
      if (child->backward && seen.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  node_->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

Tensor MatMul(const Tensor &a, const Tensor &b) {
  if (a.rank() != 2 || (b.rank() != 2 && b.rank() != 1) ||
      a.shape()[1] != b.shape()[0]) {
    throw ShapeError("matmul: incompatible shapes " + ShapeString(a.shape()) +
                     " and " + ShapeString(b.shape()));
  }
  const std::size_t m = a.shape()[0], k = a.shape()[1];
  const std::size_t n = b.rank() == 2 ? b.shape()[1] : 1;
  const auto av = a.values(), bv = b.values();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      if (x == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += x * bv[p * n + j];
    }
  }
  Shape shape = b.rank() == 2 ? Shape{m, n} : Shape{m};
  auto an = a.node(), bn = b.node();
  return MakeResult(std::move(shape), std::move(out), {an, bn},
                    [an, bn, m, k, n](Node &self) {
                      const auto &g = self.grad;
                      if (an->requires_grad) {
                        // dA = G * B^T
                        for (std::size_t i = 0; i < m; ++i)
                          for (std::size_t p = 0; p < k; ++p) {
                            double acc = 0.0;
                            for (std::size_t j = 0; j < n; ++j)
                              acc += g[i * n + j] * bn->value[p * n + j];
                            an->grad[i * k + p] += acc;
                          }
                      }
                      if (bn->requires_grad) {
                        // dB = A^T * G
                        for (std::size_t i = 0; i < m; ++i)
                          for (std::size_t p = 0; p < k; ++p) {
                            const double x = an->value[i * k + p];
                            for (std::size_t j = 0; j < n; ++j)
                              bn->grad[p * n + j] += x * g[i * n + j];
                          }
                      }
                    });
}

Tensor Affine(const Tensor &w, const Tensor &x, const Tensor &bias) {
  if (w.rank() != 2 || w.shape()[1] != x.size() || w.shape()[0] != bias.size()) {
    throw ShapeError("affine: weight " + ShapeString(w.shape()) + ", input " +
                     ShapeString(x.shape()) + ", bias " +
                     ShapeString(bias.shape()));
  }
  const std::size_t m = w.shape()[0], k = w.shape()[1];
  const auto wv = w.values(), xv = x.values(), bv = bias.values();
  std::vector<double> out(bv.begin(), bv.end());
  for (std::size_t i = 0; i < m; ++i) {
    const double *row = wv.data() + i * k;
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += row[p] * xv[p];
    out[i] += acc;
  }
  auto wn = w.node(), xn = x.node(), bn = bias.node();
  return MakeResult({m}, std::move(out), {wn, xn, bn},
                    [wn, xn, bn, m, k](Node &self) {
                      const auto &g = self.grad;
                      if (bn->requires_grad)
                        for (std::size_t i = 0; i < m; ++i) bn->grad[i] += g[i];
                      if (wn->requires_grad)
                        for (std::size_t i = 0; i < m; ++i) {
                          if (g[i] == 0.0) continue;
                          double *row = wn->grad.data() + i * k;
                          for (std::size_t p = 0; p < k; ++p)
                            row[p] += g[i] * xn->value[p];
                        }
                      if (xn->requires_grad)
                        for (std::size_t i = 0; i < m; ++i) {
                          if (g[i] == 0.0) continue;
                          const double *row = wn->value.data() + i * k;
                          for (std::size_t p = 0; p < k; ++p)
                            xn->grad[p] += g[i] * row[p];
                        }
                    });
}

Tensor Add(const Tensor &a, const Tensor &b) {
  RequireSameSize(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  auto an = a.node(), bn = b.node();
  return MakeResult(a.shape(), std::move(out), {an, bn}, [an, bn](Node &self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (an->requires_grad) an->grad[i] += self.grad[i];
      if (bn->requires_grad) bn->grad[i] += self.grad[i];
    }
  });
}

Tensor Sub(const Tensor &a, const Tensor &b) {
  RequireSameSize(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  auto an = a.node(), bn = b.node();
  return MakeResult(a.shape(), std::move(out), {an, bn}, [an, bn](Node &self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (an->requires_grad) an->grad[i] += self.grad[i];
      if (bn->requires_grad) bn->grad[i] -= self.grad[i];
    }
  });
}

Tensor Mul(const Tensor &a, const Tensor &b) {
  RequireSameSize(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  auto an = a.node(), bn = b.node();
  return MakeResult(a.shape(), std::move(out), {an, bn}, [an, bn](Node &self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (an->requires_grad) an->grad[i] += self.grad[i] * bn->value[i];
      if (bn->requires_grad) bn->grad[i] += self.grad[i] * an->value[i];
    }
  });
}

Tensor Scale(const Tensor &a, double factor) {
  auto an = a.node();
  return Unary(
      a, [factor](double x) { return x * factor; },
      [an, factor](Node &self) {
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          an->grad[i] += self.grad[i] * factor;
      });
}

Tensor MaskMul(const Tensor &a, std::vector<double> mask) {
  if (mask.size() != a.size()) {
    throw ShapeError("mask of size " + std::to_string(mask.size()) +
                     " for tensor " + ShapeString(a.shape()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * mask[i];
  auto an = a.node();
  return MakeResult(a.shape(), std::move(out), {an},
                    [an, mask = std::move(mask)](Node &self) {
                      for (std::size_t i = 0; i < self.grad.size(); ++i)
                        an->grad[i] += self.grad[i] * mask[i];
                    });
}

Tensor Sigmoid(const Tensor &a) {
  auto an = a.node();
  return Unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [an](Node &self) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          const double y = self.value[i];
          an->grad[i] += self.grad[i] * y * (1.0 - y);
        }
      });
}

Tensor Tanh(const Tensor &a) {
  auto an = a.node();
  return Unary(
      a, [](double x) { return std::tanh(x); },
      [an](Node &self) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          const double y = self.value[i];
          an->grad[i] += self.grad[i] * (1.0 - y * y);
        }
      });
}

Tensor Relu(const Tensor &a) {
  auto an = a.node();
  return Unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [an](Node &self) {
        for (std::size_t i = 0; i < self.grad.size(); ++i)
          if (an->value[i] > 0.0) an->grad[i] += self.grad[i];
      });
}

Tensor Concat(std::span<const Tensor> parts) {
  std::vector<double> out;
  std::vector<std::shared_ptr<Node>> inputs;
  inputs.reserve(parts.size());
  for (const auto &p : parts) {
    out.insert(out.end(), p.values().begin(), p.values().end());
    inputs.push_back(p.node());
  }
  const std::size_t n = out.size();
  return MakeResult({n}, std::move(out), inputs, [](Node &self) {
    std::size_t offset = 0;
    for (const auto &in : self.inputs) {
      if (in->requires_grad)
        for (std::size_t i = 0; i < in->value.size(); ++i)
          in->grad[i] += self.grad[offset + i];
      offset += in->value.size();
    }
  });
}

Tensor Concat(std::initializer_list<Tensor> parts) {
  return Concat(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor Slice(const Tensor &a, std::size_t offset, std::size_t length) {
  if (offset + length > a.size()) {
    throw ShapeError("slice [" + std::to_string(offset) + ", " +
                     std::to_string(offset + length) + ") of " +
                     ShapeString(a.shape()));
  }
  std::vector<double> out(a.values().begin() + offset,
                          a.values().begin() + offset + length);
  auto an = a.node();
  return MakeResult({length}, std::move(out), {an}, [an, offset](Node &self) {
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      an->grad[offset + i] += self.grad[i];
  });
}

Tensor Pick(const Tensor &a, std::size_t index) {
  if (index >= a.size()) {
    throw ShapeError("pick index " + std::to_string(index) + " in " +
                     ShapeString(a.shape()));
  }
  auto an = a.node();
  return MakeResult({}, {a[index]}, {an}, [an, index](Node &self) {
    an->grad[index] += self.grad[0];
  });
}

Tensor Sum(const Tensor &a) {
  const auto v = a.values();
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  auto an = a.node();
  return MakeResult({}, {s}, {an}, [an](Node &self) {
    for (double &g : an->grad) g += self.grad[0];
  });
}

Tensor Dot(const Tensor &a, const Tensor &b) {
  RequireSameSize(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  auto an = a.node(), bn = b.node();
  return MakeResult({}, {s}, {an, bn}, [an, bn](Node &self) {
    const double g = self.grad[0];
    for (std::size_t i = 0; i < an->value.size(); ++i) {
      if (an->requires_grad) an->grad[i] += g * bn->value[i];
      if (bn->requires_grad) bn->grad[i] += g * an->value[i];
    }
  });
}

Tensor WeightedSum(const Tensor &weights, std::span<const Tensor> vectors) {
  if (weights.size() != vectors.size() || vectors.empty()) {
    throw ShapeError("weighted sum: " + std::to_string(weights.size()) +
                     " weights for " + std::to_string(vectors.size()) +
                     " vectors");
  }
  const std::size_t width = vectors.front().size();
  std::vector<double> out(width, 0.0);
  std::vector<std::shared_ptr<Node>> inputs{weights.node()};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != width) {
      throw ShapeError("weighted sum: vector " + std::to_string(i) +
                       " has shape " + ShapeString(vectors[i].shape()));
    }
    for (std::size_t p = 0; p < width; ++p) out[p] += weights[i] * vectors[i][p];
    inputs.push_back(vectors[i].node());
  }
  return MakeResult({width}, std::move(out), inputs, [width](Node &self) {
    const auto &wn = self.inputs[0];
    for (std::size_t i = 0; i + 1 < self.inputs.size(); ++i) {
      const auto &vn = self.inputs[i + 1];
      double gw = 0.0;
      for (std::size_t p = 0; p < width; ++p) {
        gw += self.grad[p] * vn->value[p];
        if (vn->requires_grad) vn->grad[p] += self.grad[p] * wn->value[i];
      }
      if (wn->requires_grad) wn->grad[i] += gw;
    }
  });
}

Tensor Softmax(const Tensor &scores) {
  if (scores.size() == 0) throw ShapeError("softmax of an empty tensor");
  const auto s = scores.values();
  const double mx = *std::max_element(s.begin(), s.end());
  std::vector<double> out(s.size());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) z += out[i] = std::exp(s[i] - mx);
  for (double &p : out) p /= z;
  auto sn = scores.node();
  return MakeResult(scores.shape(), std::move(out), {sn}, [sn](Node &self) {
    // dL/ds_i = p_i (g_i - sum_j g_j p_j)
    double inner = 0.0;
    for (std::size_t j = 0; j < self.grad.size(); ++j)
      inner += self.grad[j] * self.value[j];
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      sn->grad[i] += self.value[i] * (self.grad[i] - inner);
  });
}

Tensor LogSumExp(const Tensor &scores) {
  if (scores.size() == 0) throw ShapeError("log-sum-exp of an empty tensor");
  const auto s = scores.values();
  const double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double x : s) z += std::exp(x - mx);
  const double lse = mx + std::log(z);
  auto sn = scores.node();
  return MakeResult({}, {lse}, {sn}, [sn](Node &self) {
    const double g = self.grad[0];
    const double out = self.value[0];
    for (std::size_t i = 0; i < sn->value.size(); ++i)
      sn->grad[i] += g * std::exp(sn->value[i] - out);
  });
}

}  // namespace gnr
