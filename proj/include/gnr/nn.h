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

// Layers, parameters, regularizers and the optimizer built on gnr::Tensor.

#ifndef GNR_NN_H_
#define GNR_NN_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gnr/tensor.h"

namespace gnr {

// Counter-based random stream (splitmix64). Every draw is a pure function of
// (seed, counter), so a fixed seed and a fixed call order reproduce the same
// numbers on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t NextU64();
  // Uniform on [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer on [0, n). n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);
  // Standard normal (Box-Muller, two draws per sample).
  double Normal();
  // Independent child stream, e.g. one per example.
  RngStream Fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

struct ParameterEntry {
  std::string name;
  Tensor tensor;
  // Recurrent (hidden-to-hidden) weight matrices receive weight noise.
  bool recurrent = false;
  // Adam moments; empty until the first optimizer step touches them.
  std::vector<double> m;
  std::vector<double> v;
};

class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore &) = delete;
  ParameterStore &operator=(const ParameterStore &) = delete;
  ParameterStore(ParameterStore &&) = default;
  ParameterStore &operator=(ParameterStore &&) = default;

  // Registers a new parameter. Names must be unique.
  Tensor Add(const std::string &name, Shape shape, std::vector<double> values,
             bool recurrent = false);
  bool Contains(std::string_view name) const;
  Tensor Get(std::string_view name) const;
  ParameterEntry &Entry(std::string_view name);

  std::vector<ParameterEntry> &entries() { return entries_; }
  const std::vector<ParameterEntry> &entries() const { return entries_; }

  void ZeroGrad();
  std::size_t NumScalars() const;

  std::int64_t step() const { return step_; }
  void set_step(std::int64_t step) { step_ = step; }

 private:
  std::vector<ParameterEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::int64_t step_ = 0;
};

struct AdamOptions {
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update over every parameter, then zeroes the
// gradients. The step counter is shared by the whole store.
void AdamStep(ParameterStore &store, const AdamOptions &options = {});

// Unperturbed values of every parameter PerturbWeights touched, restored
// bit for bit after the backward pass.
struct WeightNoise {
  std::vector<std::pair<std::size_t, std::vector<double>>> saved;
};

// Adds independent N(0, sigma^2) noise to every recurrent weight matrix.
WeightNoise PerturbWeights(ParameterStore &store, double sigma, RngStream &rng);
void RemoveWeightNoise(ParameterStore &store, const WeightNoise &noise);

// Inverted dropout: in training mode each element survives with probability
// 1 - rate and is scaled by 1 / (1 - rate); in inference mode the input is
// returned unchanged.
Tensor ApplyDropout(const Tensor &x, double rate, RngStream &rng,
                    bool training);

// Dropout configuration threaded through the layers. A default-constructed
// value is the identity.
struct Dropout {
  double rate = 0.0;
  RngStream *rng = nullptr;
  bool training = false;

  Tensor operator()(const Tensor &x) const;
};

// Uniform Glorot initializer for a [rows x cols] matrix.
std::vector<double> GlorotUniform(std::size_t rows, std::size_t cols,
                                  RngStream &rng);

struct LinearParams {
  Tensor weight;  // [out x in]
  Tensor bias;    // [out]

  static LinearParams Create(ParameterStore &store, const std::string &prefix,
                             std::size_t in, std::size_t out, RngStream &rng);
  static LinearParams Lookup(const ParameterStore &store,
                             const std::string &prefix);
};

Tensor Linear(const Tensor &x, const LinearParams &params);

// affine -> Relu -> affine
struct MlpParams {
  LinearParams hidden;
  LinearParams output;

  static MlpParams Create(ParameterStore &store, const std::string &prefix,
                          std::size_t in, std::size_t hidden, std::size_t out,
                          RngStream &rng);
  static MlpParams Lookup(const ParameterStore &store,
                          const std::string &prefix);
};

Tensor Mlp2(const Tensor &x, const MlpParams &params,
            const Dropout &dropout = {});

// Gate layout inside the stacked [4h] pre-activation: input, forget, output,
// candidate.
struct LstmParams {
  Tensor input_weight;      // [4h x in]
  Tensor recurrent_weight;  // [4h x h]
  Tensor bias;              // [4h]
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;

  static LstmParams Create(ParameterStore &store, const std::string &prefix,
                           std::size_t input_size, std::size_t hidden_size,
                           RngStream &rng);
  static LstmParams Lookup(const ParameterStore &store,
                           const std::string &prefix);
};

struct LstmState {
  Tensor h;
  Tensor c;
};

LstmState ZeroLstmState(std::size_t hidden_size);
LstmState LstmStep(const Tensor &x, const LstmState &prev,
                   const LstmParams &params);

struct BiLstmLayer {
  LstmParams forward;
  LstmParams backward;
};

struct BiLstmParams {
  std::vector<BiLstmLayer> layers;

  std::size_t depth() const { return layers.size(); }
  std::size_t hidden_size() const { return layers.front().forward.hidden_size; }

  // Layer 0 reads input_size features; deeper layers read 2 * hidden_size.
  static BiLstmParams Create(ParameterStore &store, const std::string &prefix,
                             std::size_t depth, std::size_t input_size,
                             std::size_t hidden_size, RngStream &rng);
  static BiLstmParams Lookup(const ParameterStore &store,
                             const std::string &prefix, std::size_t depth);
};

struct BiState {
  Tensor forward;
  Tensor backward;
};

// Runs a stack of bidirectional LSTMs. Layer l consumes [h_fwd; h_bwd] of
// layer l-1 at each position. Dropout is applied to the input of every
// layer at every time step. Returns the top layer's states per position.
std::vector<BiState> BiLstmStack(std::span<const Tensor> inputs,
                                 const BiLstmParams &params,
                                 const Dropout &dropout = {});

// Flat binary checkpoint: "GNRCKPT1", then per tensor a u64 name length,
// name bytes, u64 rank, u64 dims and float32 values, all little-endian.
// Adam moments follow as "<name>/m" and "<name>/v" entries, and the step
// counter as a one-element "adam/step" entry.
std::string EncodeCheckpoint(const ParameterStore &store);
// Overwrites values (and Adam state) of the store's existing parameters.
// Every parameter of the store must be present with a matching shape.
void DecodeCheckpoint(std::string_view bytes, ParameterStore &store);
void SaveCheckpoint(const std::string &path, const ParameterStore &store);
void LoadCheckpoint(const std::string &path, ParameterStore &store);

}  // namespace gnr

#endif  // GNR_NN_H_
