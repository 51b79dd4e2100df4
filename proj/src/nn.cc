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

#include "gnr/nn.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "gnr/errors.h"

namespace gnr {

// --- RngStream ---------------------------------------------------------------

std::uint64_t RngStream::NextU64() {
  std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RngStream::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::UniformInt(std::uint64_t n) {
  if (n == 0) throw InputError("UniformInt over an empty range");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

double RngStream::Normal() {
  double u1 = Uniform();
  const double u2 = Uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream RngStream::Fork(std::uint64_t stream) const {
  RngStream mixer(seed_ ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  return RngStream(mixer.NextU64());
}

// --- ParameterStore ----------------------------------------------------------

Tensor ParameterStore::Add(const std::string &name, Shape shape,
                           std::vector<double> values, bool recurrent) {
  if (index_.contains(name)) {
    throw InputError("duplicate parameter name '" + name + "'");
  }
  ParameterEntry entry;
  entry.name = name;
  entry.tensor = Tensor::Parameter(std::move(shape), std::move(values));
  entry.recurrent = recurrent;
  index_.emplace(name, entries_.size());
  entries_.push_back(std::move(entry));
  return entries_.back().tensor;
}

bool ParameterStore::Contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

Tensor ParameterStore::Get(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw InputError("unknown parameter '" + std::string(name) + "'");
  }
  return entries_[it->second].tensor;
}

ParameterEntry &ParameterStore::Entry(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw InputError("unknown parameter '" + std::string(name) + "'");
  }
  return entries_[it->second];
}

void ParameterStore::ZeroGrad() {
  for (auto &e : entries_) e.tensor.ZeroGrad();
}

std::size_t ParameterStore::NumScalars() const {
  std::size_t n = 0;
  for (const auto &e : entries_) n += e.tensor.size();
  return n;
}

// --- Optimizer and regularizers ----------------------------------------------

void AdamStep(ParameterStore &store, const AdamOptions &options) {
  store.set_step(store.step() + 1);
  const double t = static_cast<double>(store.step());
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (auto &e : store.entries()) {
    auto value = e.tensor.mutable_values();
    auto grad = e.tensor.mutable_grad();
    if (e.m.size() != value.size()) e.m.assign(value.size(), 0.0);
    if (e.v.size() != value.size()) e.v.assign(value.size(), 0.0);
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      e.m[i] = options.beta1 * e.m[i] + (1.0 - options.beta1) * g;
      e.v[i] = options.beta2 * e.v[i] + (1.0 - options.beta2) * g * g;
      const double m_hat = e.m[i] / correction1;
      const double v_hat = e.v[i] / correction2;
      value[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
      grad[i] = 0.0;
    }
  }
}

WeightNoise PerturbWeights(ParameterStore &store, double sigma,
                           RngStream &rng) {
  if (!(sigma >= 0.0)) {
    throw InputError("weight noise sigma must be non-negative, got " +
                     std::to_string(sigma));
  }
  WeightNoise noise;
  if (sigma == 0.0) return noise;
  for (std::size_t p = 0; p < store.entries().size(); ++p) {
    auto &e = store.entries()[p];
    if (!e.recurrent) continue;
    auto value = e.tensor.mutable_values();
    noise.saved.emplace_back(p, std::vector<double>(value.begin(), value.end()));
    for (double &v : value) v += sigma * rng.Normal();
  }
  return noise;
}

void RemoveWeightNoise(ParameterStore &store, const WeightNoise &noise) {
  for (const auto &[p, original] : noise.saved) {
    auto value = store.entries()[p].tensor.mutable_values();
    std::copy(original.begin(), original.end(), value.begin());
  }
}

Tensor ApplyDropout(const Tensor &x, double rate, RngStream &rng,
                    bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InputError("dropout rate must lie in [0, 1), got " +
                     std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.size());
  for (double &m : mask) m = rng.Uniform() < rate ? 0.0 : keep_scale;
  return MaskMul(x, std::move(mask));
}

Tensor Dropout::operator()(const Tensor &x) const {
  if (!training || rate == 0.0 || rng == nullptr) return x;
  return ApplyDropout(x, rate, *rng, training);
}

std::vector<double> GlorotUniform(std::size_t rows, std::size_t cols,
                                  RngStream &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::vector<double> w(rows * cols);
  for (double &x : w) x = rng.Uniform(-limit, limit);
  return w;
}

// --- Layers ------------------------------------------------------------------

LinearParams LinearParams::Create(ParameterStore &store,
                                  const std::string &prefix, std::size_t in,
                                  std::size_t out, RngStream &rng) {
  LinearParams p;
  p.weight = store.Add(prefix + "/W", {out, in}, GlorotUniform(out, in, rng));
  p.bias = store.Add(prefix + "/b", {out}, std::vector<double>(out, 0.0));
  return p;
}

LinearParams LinearParams::Lookup(const ParameterStore &store,
                                  const std::string &prefix) {
  return {store.Get(prefix + "/W"), store.Get(prefix + "/b")};
}

Tensor Linear(const Tensor &x, const LinearParams &params) {
  return Affine(params.weight, x, params.bias);
}

MlpParams MlpParams::Create(ParameterStore &store, const std::string &prefix,
                            std::size_t in, std::size_t hidden,
                            std::size_t out, RngStream &rng) {
  MlpParams p;
  p.hidden = LinearParams::Create(store, prefix + "/l1", in, hidden, rng);
  p.output = LinearParams::Create(store, prefix + "/l2", hidden, out, rng);
  return p;
}

MlpParams MlpParams::Lookup(const ParameterStore &store,
                            const std::string &prefix) {
  return {LinearParams::Lookup(store, prefix + "/l1"),
          LinearParams::Lookup(store, prefix + "/l2")};
}

Tensor Mlp2(const Tensor &x, const MlpParams &params, const Dropout &dropout) {
  Tensor h = Relu(Linear(dropout(x), params.hidden));
  return Linear(dropout(h), params.output);
}

LstmParams LstmParams::Create(ParameterStore &store, const std::string &prefix,
                              std::size_t input_size, std::size_t hidden_size,
                              RngStream &rng) {
  const std::size_t gates = 4 * hidden_size;
  std::vector<double> bias(gates, 0.0);
  for (std::size_t i = hidden_size; i < 2 * hidden_size; ++i) bias[i] = 1.0;
  LstmParams p;
  p.input_weight = store.Add(prefix + "/Wx", {gates, input_size},
                             GlorotUniform(gates, input_size, rng));
  p.recurrent_weight =
      store.Add(prefix + "/Wh", {gates, hidden_size},
                GlorotUniform(gates, hidden_size, rng), /*recurrent=*/true);
  p.bias = store.Add(prefix + "/b", {gates}, std::move(bias));
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  return p;
}

LstmParams LstmParams::Lookup(const ParameterStore &store,
                              const std::string &prefix) {
  LstmParams p;
  p.input_weight = store.Get(prefix + "/Wx");
  p.recurrent_weight = store.Get(prefix + "/Wh");
  p.bias = store.Get(prefix + "/b");
  p.input_size = p.input_weight.shape()[1];
  p.hidden_size = p.recurrent_weight.shape()[1];
  return p;
}

LstmState ZeroLstmState(std::size_t hidden_size) {
  return {Tensor::Zeros({hidden_size}), Tensor::Zeros({hidden_size})};
}

LstmState LstmStep(const Tensor &x, const LstmState &prev,
                   const LstmParams &params) {
  const std::size_t h = params.hidden_size;
  if (x.size() != params.input_size || prev.h.size() != h || prev.c.size() != h) {
    throw ShapeError("lstm step: input " + ShapeString(x.shape()) + ", state " +
                     ShapeString(prev.h.shape()) + "/" +
                     ShapeString(prev.c.shape()) + " for cell " +
                     std::to_string(params.input_size) + "->" +
                     std::to_string(h));
  }
  Tensor pre = Add(Affine(params.input_weight, x, params.bias),
                   MatMul(params.recurrent_weight, prev.h));
  Tensor in_gate = Sigmoid(Slice(pre, 0, h));
  Tensor forget_gate = Sigmoid(Slice(pre, h, h));
  Tensor out_gate = Sigmoid(Slice(pre, 2 * h, h));
  Tensor candidate = Tanh(Slice(pre, 3 * h, h));
  Tensor c = Add(Mul(forget_gate, prev.c), Mul(in_gate, candidate));
  return {Mul(out_gate, Tanh(c)), c};
}

BiLstmParams BiLstmParams::Create(ParameterStore &store,
                                  const std::string &prefix, std::size_t depth,
                                  std::size_t input_size,
                                  std::size_t hidden_size, RngStream &rng) {
  if (depth == 0) throw InputError("bidirectional stack needs depth >= 1");
  BiLstmParams p;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t in = l == 0 ? input_size : 2 * hidden_size;
    const std::string layer = prefix + "/l" + std::to_string(l);
    BiLstmLayer bl;
    bl.forward = LstmParams::Create(store, layer + "/fwd", in, hidden_size, rng);
    bl.backward = LstmParams::Create(store, layer + "/bwd", in, hidden_size, rng);
    p.layers.push_back(std::move(bl));
  }
  return p;
}

BiLstmParams BiLstmParams::Lookup(const ParameterStore &store,
                                  const std::string &prefix,
                                  std::size_t depth) {
  BiLstmParams p;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::string layer = prefix + "/l" + std::to_string(l);
    p.layers.push_back({LstmParams::Lookup(store, layer + "/fwd"),
                        LstmParams::Lookup(store, layer + "/bwd")});
  }
  return p;
}

std::vector<BiState> BiLstmStack(std::span<const Tensor> inputs,
                                 const BiLstmParams &params,
                                 const Dropout &dropout) {
  if (inputs.empty()) throw InputError("bidirectional LSTM over an empty sequence");
  if (params.layers.empty()) throw InputError("bidirectional stack needs depth >= 1");
  const std::size_t n = inputs.size();
  std::vector<Tensor> layer_in(inputs.begin(), inputs.end());
  std::vector<BiState> states(n);
  for (const auto &layer : params.layers) {
    std::vector<Tensor> dropped(n);
    for (std::size_t t = 0; t < n; ++t) dropped[t] = dropout(layer_in[t]);

    LstmState s = ZeroLstmState(layer.forward.hidden_size);
    for (std::size_t t = 0; t < n; ++t) {
      s = LstmStep(dropped[t], s, layer.forward);
      states[t].forward = s.h;
    }
    s = ZeroLstmState(layer.backward.hidden_size);
    for (std::size_t t = n; t-- > 0;) {
      s = LstmStep(dropped[t], s, layer.backward);
      states[t].backward = s.h;
    }
    for (std::size_t t = 0; t < n; ++t) {
      layer_in[t] = Concat({states[t].forward, states[t].backward});
    }
  }
  return states;
}

// --- Checkpoints -------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "GNRCKPT1";

void PutU64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutF32(std::string &out, double value) {
  const std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

void PutTensor(std::string &out, const std::string &name, const Shape &shape,
               std::span<const double> values) {
  PutU64(out, name.size());
  out += name;
  PutU64(out, shape.size());
  for (std::size_t d : shape) PutU64(out, d);
  for (double v : values) PutF32(out, v);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }

  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  double F32() {
    Need(4);
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i)
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return std::bit_cast<float>(bits);
  }

  std::string Bytes(std::size_t n) {
    Need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint is truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string EncodeCheckpoint(const ParameterStore &store) {
  std::string out(kMagic);
  for (const auto &e : store.entries()) {
    PutTensor(out, e.name, e.tensor.shape(), e.tensor.values());
  }
  for (const auto &e : store.entries()) {
    const std::vector<double> zeros(e.tensor.size(), 0.0);
    PutTensor(out, e.name + "/m", e.tensor.shape(), e.m.empty() ? zeros : e.m);
    PutTensor(out, e.name + "/v", e.tensor.shape(), e.v.empty() ? zeros : e.v);
  }
  const double step = static_cast<double>(store.step());
  PutTensor(out, "adam/step", {1}, std::span<const double>(&step, 1));
  return out;
}

void DecodeCheckpoint(std::string_view bytes, ParameterStore &store) {
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    throw DataError("not a checkpoint: bad magic");
  }
  Reader reader(bytes.substr(kMagic.size()));
  std::unordered_map<std::string, std::pair<Shape, std::vector<double>>> found;
  while (!reader.done()) {
    const std::uint64_t name_len = reader.U64();
    std::string name = reader.Bytes(name_len);
    const std::uint64_t rank = reader.U64();
    if (rank > 8) throw DataError("checkpoint tensor '" + name + "' has rank " + std::to_string(rank));
    Shape shape(rank);
    for (auto &d : shape) d = reader.U64();
    std::vector<double> values(NumElements(shape));
    for (double &v : values) v = reader.F32();
    found[name] = {std::move(shape), std::move(values)};
  }

  auto take = [&](const std::string &name, const Shape &shape) {
    auto it = found.find(name);
    if (it == found.end()) throw DataError("checkpoint lacks tensor '" + name + "'");
    if (it->second.first != shape) {
      throw DataError("checkpoint tensor '" + name + "' has shape " +
                      ShapeString(it->second.first) + ", model expects " +
                      ShapeString(shape));
    }
    return it->second.second;
  };
  for (auto &e : store.entries()) {
    const auto values = take(e.name, e.tensor.shape());
    std::copy(values.begin(), values.end(), e.tensor.mutable_values().begin());
    e.m = take(e.name + "/m", e.tensor.shape());
    e.v = take(e.name + "/v", e.tensor.shape());
    e.tensor.ZeroGrad();
  }
  store.set_step(static_cast<std::int64_t>(take("adam/step", {1})[0]));
}

void SaveCheckpoint(const std::string &path, const ParameterStore &store) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  const std::string bytes = EncodeCheckpoint(store);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint '" + path + "'");
}

void LoadCheckpoint(const std::string &path, ParameterStore &store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  DecodeCheckpoint(bytes, store);
}

}  // namespace gnr
