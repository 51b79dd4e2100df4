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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "gnr/errors.h"
#include "gnr/tensor.h"
#include "support/testing.h"

using namespace gnr;
using gnr::testing::GradCheck;
using gnr::testing::RandomValues;

namespace {

constexpr double kTol = 1e-4;

Tensor Param(Shape shape, RngStream &rng) {
  const std::size_t n = NumElements(shape);
  return Tensor::Parameter(std::move(shape), RandomValues(n, rng));
}

// Scalar readout with distinct weights per element so every gradient entry
// is exercised.
Tensor Readout(const Tensor &x) {
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.17 * static_cast<double>(i);
  return Dot(Tensor::Constant({x.size()}, w), Concat({x}));
}

}  // namespace

TEST_CASE("forward values") {
  Tensor a = Tensor::Constant({2, 2}, {1, 2, 3, 4});
  Tensor v = Tensor::Constant({2}, {1, -1});
  CHECK(MatMul(a, v).values()[0] == doctest::Approx(-1));
  CHECK(MatMul(a, v).values()[1] == doctest::Approx(-1));
  Tensor ab = MatMul(a, a);
  CHECK(ab.shape() == Shape{2, 2});
  CHECK(ab[0] == 7);
  CHECK(ab[3] == 22);
  CHECK(Sum(a).item() == 10);
  CHECK(Relu(v)[1] == 0);
  CHECK(Sigmoid(Tensor::Scalar(0)).item() == doctest::Approx(0.5));
  CHECK(LogSumExp(Tensor::Constant({2}, {0, 0})).item() == doctest::Approx(std::log(2.0)));
  Tensor s = Softmax(Tensor::Constant({3}, {1, 2, 3}));
  CHECK(s[0] + s[1] + s[2] == doctest::Approx(1.0));
  CHECK(Slice(Tensor::Constant({4}, {1, 2, 3, 4}), 1, 2)[1] == 3);
  CHECK(Pick(v, 1).item() == -1);
}

TEST_CASE("log-sum-exp is stable for large scores") {
  Tensor x = Tensor::Constant({2}, {1000.0, 1000.0});
  CHECK(LogSumExp(x).item() == doctest::Approx(1000.0 + std::log(2.0)));
  Tensor s = Softmax(Tensor::Constant({2}, {1000.0, -1000.0}));
  CHECK(std::isfinite(s[1]));
  CHECK(s[0] == doctest::Approx(1.0));
}

TEST_CASE("shape errors") {
  Tensor a = Tensor::Constant({2, 3}, std::vector<double>(6, 1.0));
  Tensor b = Tensor::Constant({2}, {1, 1});
  CHECK_THROWS_AS(MatMul(a, b), ShapeError);
  CHECK_THROWS_AS(Add(a, b), ShapeError);
  CHECK_THROWS_AS(Dot(b, Tensor::Constant({3}, {1, 1, 1})), ShapeError);
  CHECK_THROWS_AS(Slice(b, 1, 2), ShapeError);
  CHECK_THROWS_AS(Pick(b, 2), ShapeError);
  CHECK_THROWS_AS(Tensor::Constant({3}, {1, 2}), ShapeError);
  CHECK_THROWS(b.item());
}

TEST_CASE("gradients of every primitive match central differences") {
  RngStream rng(7);
  Tensor w = Param({3, 4}, rng);
  Tensor x = Param({4}, rng);
  Tensor y = Param({4}, rng);
  Tensor b = Param({3}, rng);
  Tensor m = Param({4, 2}, rng);

  struct Case {
    const char *name;
    std::function<Tensor()> f;
    std::vector<Tensor> params;
  };
  std::vector<Case> cases = {
      {"matmul-vector", [&] { return Readout(MatMul(w, x)); }, {w, x}},
      {"matmul-matrix", [&] { return Readout(MatMul(w, m)); }, {w, m}},
      {"affine", [&] { return Readout(Affine(w, x, b)); }, {w, x, b}},
      {"add", [&] { return Readout(Add(x, y)); }, {x, y}},
      {"sub", [&] { return Readout(Sub(x, y)); }, {x, y}},
      {"mul", [&] { return Readout(Mul(x, y)); }, {x, y}},
      {"scale", [&] { return Readout(Scale(x, -1.7)); }, {x}},
      {"mask", [&] { return Readout(MaskMul(x, {0, 2, 1, 0.5})); }, {x}},
      {"sigmoid", [&] { return Readout(Sigmoid(x)); }, {x}},
      {"tanh", [&] { return Readout(Tanh(x)); }, {x}},
      {"relu", [&] { return Readout(Relu(x)); }, {x}},
      {"concat", [&] { return Readout(Concat({x, b, y})); }, {x, b, y}},
      {"slice", [&] { return Readout(Slice(x, 1, 2)); }, {x}},
      {"pick", [&] { return Mul(Pick(x, 2), Pick(y, 0)); }, {x, y}},
      {"sum", [&] { return Mul(Sum(x), Sum(x)); }, {x}},
      {"dot", [&] { return Dot(x, y); }, {x, y}},
      {"weighted-sum",
       [&] {
         std::vector<Tensor> vs = {x, y, Tanh(y)};
         return Readout(WeightedSum(Slice(b, 0, 3), vs));
       },
       {b, x, y}},
      {"softmax", [&] { return Readout(Softmax(x)); }, {x}},
      {"log-sum-exp", [&] { return LogSumExp(x); }, {x}},
  };
  for (auto &c : cases) {
    CAPTURE(c.name);
    const auto r = GradCheck(c.f, c.params);
    CHECK(r.checked > 0);
    CHECK(r.max_relative_error <= kTol);
  }
}

TEST_CASE("gradients accumulate across graphs until zeroed") {
  Tensor x = Tensor::Parameter({2}, {1.0, 2.0});
  Dot(x, x).Backward();
  Dot(x, x).Backward();
  CHECK(x.grad()[0] == doctest::Approx(4.0));
  CHECK(x.grad()[1] == doctest::Approx(8.0));
  x.ZeroGrad();
  CHECK(x.grad()[0] == 0.0);
}

TEST_CASE("shared subexpressions receive the sum of both paths") {
  Tensor x = Tensor::Parameter({1}, {3.0});
  Tensor t = Tanh(x);
  Tensor y = Add(Mul(t, t), t);
  y.Backward();
  const double th = std::tanh(3.0);
  CHECK(x.grad()[0] == doctest::Approx((2 * th + 1) * (1 - th * th)));
}

TEST_CASE("constants carry no gradient") {
  Tensor c = Tensor::Constant({2}, {1, 2});
  Tensor y = Sum(Mul(c, c));
  CHECK_FALSE(y.requires_grad());
  CHECK(c.grad().empty());
}
