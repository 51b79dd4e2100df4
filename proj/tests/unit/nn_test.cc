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
#include <cstring>

#include "gnr/errors.h"
#include "gnr/nn.h"
#include "support/testing.h"

using namespace gnr;
using gnr::testing::GradCheck;
using gnr::testing::RandomValues;

namespace {

std::vector<Tensor> AllParams(ParameterStore &store) {
  std::vector<Tensor> out;
  for (auto &e : store.entries()) out.push_back(e.tensor);
  return out;
}

double Sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("rng streams are reproducible and forks are independent") {
  RngStream a(42);
  RngStream b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.NextU64() == b.NextU64());
  RngStream f1 = RngStream(42).Fork(1);
  RngStream f2 = RngStream(42).Fork(2);
  CHECK(f1.NextU64() != f2.NextU64());
  RngStream c(3);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = c.Uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 5000; ++i) ++counts[c.UniformInt(5)];
  for (int n : counts) CHECK(n > 850);
}

TEST_CASE("single LSTM step against a hand computation") {
  // hidden 1, input 1: gates i, f, o, g.
  ParameterStore store;
  RngStream rng(1);
  LstmParams p = LstmParams::Create(store, "l", 1, 1, rng);
  auto set = [](Tensor t, std::vector<double> v) {
    std::copy(v.begin(), v.end(), t.mutable_values().begin());
  };
  set(p.input_weight, {0.5, -0.25, 1.0, 0.75});
  set(p.recurrent_weight, {0.1, 0.2, -0.3, 0.4});
  set(p.bias, {0.0, 1.0, 0.0, -0.5});
  LstmState prev{Tensor::Constant({1}, {0.2}), Tensor::Constant({1}, {-0.4})};
  LstmState next = LstmStep(Tensor::Constant({1}, {2.0}), prev, p);
  const double i = Sigm(0.5 * 2 + 0.1 * 0.2);
  const double f = Sigm(-0.25 * 2 + 0.2 * 0.2 + 1.0);
  const double o = Sigm(1.0 * 2 - 0.3 * 0.2);
  const double g = std::tanh(0.75 * 2 + 0.4 * 0.2 - 0.5);
  const double c = f * -0.4 + i * g;
  CHECK(next.c.item() == doctest::Approx(c));
  CHECK(next.h.item() == doctest::Approx(o * std::tanh(c)));
}

TEST_CASE("forget gate bias starts at one") {
  ParameterStore store;
  RngStream rng(2);
  LstmParams p = LstmParams::Create(store, "l", 3, 2, rng);
  const auto b = p.bias.values();
  CHECK(b[2] == 1.0);
  CHECK(b[3] == 1.0);
  CHECK(b[0] == 0.0);
  CHECK(store.Entry("l/Wh").recurrent);
  CHECK_FALSE(store.Entry("l/Wx").recurrent);
}

TEST_CASE("bidirectional stack gradients match central differences") {
  ParameterStore store;
  RngStream rng(3);
  BiLstmParams p = BiLstmParams::Create(store, "s", 2, 3, 2, rng);
  std::vector<Tensor> inputs;
  for (int t = 0; t < 3; ++t) inputs.push_back(Tensor::Parameter({3}, RandomValues(3, rng)));
  auto loss = [&] {
    auto states = BiLstmStack(inputs, p);
    std::vector<Tensor> parts;
    for (const auto &s : states) parts.push_back(Concat({s.forward, s.backward}));
    Tensor all = Concat(parts);
    std::vector<double> w(all.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(1.0 + i);
    return Dot(Tensor::Constant({all.size()}, w), all);
  };
  auto params = AllParams(store);
  params.insert(params.end(), inputs.begin(), inputs.end());
  const auto r = GradCheck(loss, params);
  CHECK(r.max_relative_error <= 1e-4);
}

TEST_CASE("mlp gradients match central differences") {
  ParameterStore store;
  RngStream rng(4);
  MlpParams p = MlpParams::Create(store, "m", 3, 4, 2, rng);
  Tensor x = Tensor::Parameter({3}, RandomValues(3, rng));
  const auto r = GradCheck([&] { return Sum(Tanh(Mlp2(x, p))); }, {x, p.hidden.weight,
                           p.hidden.bias, p.output.weight, p.output.bias});
  CHECK(r.max_relative_error <= 1e-4);
}

TEST_CASE("adam step matches a direct implementation") {
  ParameterStore store;
  Tensor w = store.Add("w", {2}, {1.0, -2.0});
  AdamOptions opt{0.1, 0.9, 0.999, 1e-8};
  std::vector<double> x = {1.0, -2.0};
  std::vector<double> m(2, 0.0);
  std::vector<double> v(2, 0.0);
  for (int t = 1; t <= 3; ++t) {
    store.ZeroGrad();
    Dot(w, w).Backward();  // grad 2w
    AdamStep(store, opt);
    for (int i = 0; i < 2; ++i) {
      const double g = 2 * x[i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v[i] / (1 - std::pow(0.999, t));
      x[i] -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    }
    CHECK(w[0] == doctest::Approx(x[0]).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(x[1]).epsilon(1e-12));
  }
  CHECK(store.step() == 3);
  CHECK(w.grad()[0] == 0.0);
}

TEST_CASE("dropout is inverted and off at inference") {
  RngStream rng(5);
  Tensor x = Tensor::Constant({4000}, std::vector<double>(4000, 1.0));
  Tensor y = ApplyDropout(x, 0.25, rng, true);
  double sum = 0.0;
  std::size_t zeros = 0;
  for (double v : y.values()) {
    sum += v;
    if (v == 0.0) {
      ++zeros;
    } else {
      CHECK(v == doctest::Approx(1.0 / 0.75));
    }
  }
  CHECK(sum / 4000 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(zeros > 800);
  CHECK(zeros < 1200);
  Tensor z = ApplyDropout(x, 0.25, rng, false);
  CHECK(z.node() == x.node());
  CHECK_THROWS_AS(ApplyDropout(x, 1.0, rng, true), InputError);
}

TEST_CASE("weight noise touches recurrent weights only and is removed exactly") {
  ParameterStore store;
  RngStream rng(6);
  LstmParams::Create(store, "l", 3, 2, rng);
  std::vector<std::vector<double>> before;
  for (auto &e : store.entries()) before.emplace_back(e.tensor.values().begin(), e.tensor.values().end());
  const WeightNoise noise = PerturbWeights(store, 0.1, rng);
  for (std::size_t i = 0; i < store.entries().size(); ++i) {
    const auto &e = store.entries()[i];
    const bool changed = !std::equal(before[i].begin(), before[i].end(), e.tensor.values().begin());
    CHECK(changed == e.recurrent);
  }
  RemoveWeightNoise(store, noise);
  for (std::size_t i = 0; i < store.entries().size(); ++i) {
    const auto v = store.entries()[i].tensor.values();
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(v[k] == before[i][k]);
  }
  CHECK_THROWS_AS(PerturbWeights(store, -1.0, rng), InputError);
}

TEST_CASE("glorot uniform respects its bound") {
  RngStream rng(8);
  const auto w = GlorotUniform(10, 30, rng);
  const double bound = std::sqrt(6.0 / 40.0);
  for (double x : w) CHECK(std::abs(x) <= bound);
}

TEST_CASE("checkpoints round-trip parameters, moments and the step") {
  ParameterStore a;
  RngStream rng(9);
  BiLstmParams::Create(a, "s", 1, 2, 2, rng);
  Tensor w = a.Add("w", {3}, {0.5, 0.25, -1.0});
  Dot(w, w).Backward();
  AdamStep(a);
  const std::string bytes = EncodeCheckpoint(a);
  CHECK(bytes.substr(0, 8) == "GNRCKPT1");

  ParameterStore b;
  RngStream rng2(99);
  BiLstmParams::Create(b, "s", 1, 2, 2, rng2);
  b.Add("w", {3}, {0, 0, 0});
  DecodeCheckpoint(bytes, b);
  CHECK(b.step() == 1);
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    const auto &x = a.entries()[i];
    const auto &y = b.Entry(x.name);
    for (std::size_t k = 0; k < x.tensor.size(); ++k) {
      CHECK(y.tensor[k] == static_cast<double>(static_cast<float>(x.tensor[k])));
    }
    CHECK(y.m.size() == x.m.size());
  }
  CHECK(EncodeCheckpoint(b) == bytes);

  ParameterStore wrong;
  wrong.Add("w", {4}, {0, 0, 0, 0});
  CHECK_THROWS_AS(DecodeCheckpoint(bytes, wrong), DataError);
  CHECK_THROWS_AS(DecodeCheckpoint("GNRCKPT1\x05", b), DataError);
  CHECK_THROWS_AS(DecodeCheckpoint("nope", b), DataError);
}
