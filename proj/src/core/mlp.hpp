// Copyright 2026 The Loudnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOUDNET_CORE_MLP_HPP_
#define LOUDNET_CORE_MLP_HPP_

// Feed-forward regressor 61 -> 150 -> 150 -> 150 -> 1 (ReLU hidden, linear
// output) with backpropagation of the mean squared error and Adam.
//
// Kernels are templated on the scalar type: the model trains and serves in
// float32, and the same code instantiated for double backs the gradient
// checks.

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace loudnet {

enum class Activation : uint8_t { kRelu = 0, kLinear = 1 };

struct LayerShape {
  int in = 0;
  int out = 0;
  size_t weight_offset = 0;  // out x in, row-major
  size_t bias_offset = 0;
  Activation activation = Activation::kRelu;
};

// Layer dims plus the flat parameter layout shared by model, gradients and
// optimizer moments.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  size_t num_params() const { return num_params_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  bool operator==(const Topology& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<LayerShape> layers_;
  size_t num_params_ = 0;
};

inline const std::vector<int> kLoudnessDims = {61, 150, 150, 150, 1};
inline constexpr float kDefaultInputShift = -50.0f;
inline constexpr float kDefaultInputScale = 1.0f / 50.0f;

struct MlpModel {
  Topology topology;
  std::vector<float> params;
  // x_hat = (x + input_shift) * input_scale
  float input_shift = kDefaultInputShift;
  float input_scale = kDefaultInputScale;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  void Validate() const;
};

// Fan-in scaled uniform weights (variance 2 / fan_in), zero biases.
MlpModel InitModel(uint64_t seed, const std::vector<int>& dims = kLoudnessDims);

// Folds the input normalisation into the first layer.
MlpModel FuseNormalization(const MlpModel& model);

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-thread scratch for activations and backpropagated errors.
template <typename T>
struct Workspace {
  std::vector<RowMatrix<T>> acts;  // acts[0] = normalised input
  std::vector<RowMatrix<T>> deltas;
  std::vector<double> bias_acc;
};

// Batched forward pass over `rows` inputs laid out row-major in x.
template <typename T>
void Forward(const Topology& topo, std::span<const T> params, T shift, T scale,
             std::span<const T> x, size_t rows, Workspace<T>& ws, std::span<T> out);

// Gradient of the batch mean squared error; returns the loss. Throws a
// numeric Error naming the layer on non-finite activations.
template <typename T>
double Backward(const Topology& topo, std::span<const T> params, T shift, T scale,
                std::span<const T> x, std::span<const T> targets, size_t rows, Workspace<T>& ws,
                std::span<T> grads);

double LossMse(std::span<const float> pred, std::span<const float> target);
double LossMse(std::span<const double> pred, std::span<const double> target);

// Convenience wrappers over a model.
std::vector<float> Predict(const MlpModel& model, std::span<const float> x, size_t rows);
float PredictOne(const MlpModel& model, std::span<const float> x);

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void Validate() const;
};

template <typename T>
struct AdamMoments {
  std::vector<T> m;
  std::vector<T> v;
  uint64_t t = 0;
};

template <typename T>
void AdamStep(std::span<T> params, std::span<const T> grads, AdamMoments<T>& state,
              const AdamConfig& config);

// "LDNN" model file, see README for the layout.
void SaveModel(const std::string& path, const MlpModel& model);
MlpModel LoadModel(const std::string& path);
std::vector<uint8_t> SerializeModel(const MlpModel& model);
MlpModel DeserializeModel(std::span<const uint8_t> bytes, const std::string& what = "model");

}  // namespace loudnet

#endif  // LOUDNET_CORE_MLP_HPP_
