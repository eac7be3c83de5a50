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

#include "mlp.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "util.hpp"

namespace loudnet {

namespace {

constexpr uint16_t kModelVersion = 1;

template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

template <typename T>
Eigen::Map<const RowMatrix<T>> WeightsOf(const LayerShape& l, std::span<const T> params) {
  return Eigen::Map<const RowMatrix<T>>(params.data() + l.weight_offset, l.out, l.in);
}

template <typename T>
Eigen::Map<const RowVector<T>> BiasOf(const LayerShape& l, std::span<const T> params) {
  return Eigen::Map<const RowVector<T>>(params.data() + l.bias_offset, l.out);
}

template <typename T>
void RunForward(const Topology& topo, std::span<const T> params, T shift, T scale,
                std::span<const T> x, size_t rows, Workspace<T>& ws, bool check_finite) {
  Require(params.size() == topo.num_params(), "parameter count does not match topology");
  Require(x.size() == rows * static_cast<size_t>(topo.input_dim()),
          "input batch must have " + std::to_string(topo.input_dim()) + " columns");
  const auto& layers = topo.layers();
  ws.acts.resize(layers.size() + 1);
  const auto n = static_cast<Eigen::Index>(rows);
  Eigen::Map<const RowMatrix<T>> input(x.data(), n, topo.input_dim());
  ws.acts[0].resize(n, topo.input_dim());
  ws.acts[0].array() = (input.array() + shift) * scale;
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    auto& a = ws.acts[i + 1];
    a.resize(n, l.out);
    a.noalias() = ws.acts[i] * WeightsOf(l, params).transpose();
    a.rowwise() += BiasOf(l, params);
    if (l.activation == Activation::kRelu) a = a.cwiseMax(T(0));
    if (check_finite && !a.allFinite()) {
      Fail(ErrorCode::kNumeric, "non-finite activation in layer " + std::to_string(i + 1));
    }
  }
}

}  // namespace

Topology::Topology(std::vector<int> dims) : dims_(std::move(dims)) {
  Require(dims_.size() >= 2, "a network needs at least an input and an output layer");
  for (int d : dims_) Require(d > 0, "layer widths must be positive");
  size_t offset = 0;
  for (size_t i = 0; i + 1 < dims_.size(); ++i) {
    LayerShape l;
    l.in = dims_[i];
    l.out = dims_[i + 1];
    l.weight_offset = offset;
    offset += static_cast<size_t>(l.in) * l.out;
    l.bias_offset = offset;
    offset += l.out;
    l.activation = i + 2 == dims_.size() ? Activation::kLinear : Activation::kRelu;
    layers_.push_back(l);
  }
  num_params_ = offset;
}

void MlpModel::Validate() const {
  Require(topology.dims().size() >= 2, "model has no layers");
  Require(params.size() == topology.num_params(), "model parameter count mismatch");
  Require(topology.layers().back().activation == Activation::kLinear,
          "output activation must be linear");
  Require(std::isfinite(input_shift) && std::isfinite(input_scale) && input_scale != 0.0f,
          "invalid input normalisation");
  for (float p : params) {
    if (!std::isfinite(p)) Fail(ErrorCode::kNumeric, "model has non-finite parameters");
  }
}

MlpModel InitModel(uint64_t seed, const std::vector<int>& dims) {
  MlpModel model;
  model.topology = Topology(dims);
  model.params.assign(model.topology.num_params(), 0.0f);
  Rng rng(seed);
  for (const auto& l : model.topology.layers()) {
    const double limit = std::sqrt(6.0 / l.in);
    for (size_t k = 0; k < static_cast<size_t>(l.in) * l.out; ++k) {
      model.params[l.weight_offset + k] = static_cast<float>(rng.Uniform(-limit, limit));
    }
  }
  model.metadata["init_seed"] = seed;
  return model;
}

MlpModel FuseNormalization(const MlpModel& model) {
  MlpModel fused = model;
  const auto& l = model.topology.layers().front();
  for (int o = 0; o < l.out; ++o) {
    double row_sum = 0.0;
    for (int i = 0; i < l.in; ++i) {
      const size_t k = l.weight_offset + static_cast<size_t>(o) * l.in + i;
      row_sum += model.params[k];
      fused.params[k] = model.params[k] * model.input_scale;
    }
    fused.params[l.bias_offset + o] = static_cast<float>(
        model.params[l.bias_offset + o] + row_sum * model.input_shift * model.input_scale);
  }
  fused.input_shift = 0.0f;
  fused.input_scale = 1.0f;
  return fused;
}

template <typename T>
void Forward(const Topology& topo, std::span<const T> params, T shift, T scale,
             std::span<const T> x, size_t rows, Workspace<T>& ws, std::span<T> out) {
  Require(topo.output_dim() == 1, "Forward expects a scalar-output network");
  Require(out.size() == rows, "output span must hold one value per row");
  RunForward(topo, params, shift, scale, x, rows, ws, false);
  const auto& y = ws.acts.back();
  for (size_t r = 0; r < rows; ++r) out[r] = y(static_cast<Eigen::Index>(r), 0);
}

template <typename T>
double Backward(const Topology& topo, std::span<const T> params, T shift, T scale,
                std::span<const T> x, std::span<const T> targets, size_t rows, Workspace<T>& ws,
                std::span<T> grads) {
  Require(rows > 0, "empty batch");
  Require(topo.output_dim() == 1, "Backward expects a scalar-output network");
  Require(targets.size() == rows, "one target per row required");
  Require(grads.size() == topo.num_params(), "gradient buffer size mismatch");
  RunForward(topo, params, shift, scale, x, rows, ws, true);

  const auto& layers = topo.layers();
  const auto n = static_cast<Eigen::Index>(rows);
  ws.deltas.resize(layers.size());
  auto& top = ws.deltas.back();
  top.resize(n, 1);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double d = static_cast<double>(ws.acts.back()(r, 0)) - targets[r];
    loss += d * d;
    top(r, 0) = static_cast<T>(2.0 * d / static_cast<double>(rows));
  }
  loss /= static_cast<double>(rows);

  for (size_t i = layers.size(); i-- > 0;) {
    const auto& l = layers[i];
    const auto& delta = ws.deltas[i];
    Eigen::Map<RowMatrix<T>> grad_w(grads.data() + l.weight_offset, l.out, l.in);
    grad_w.noalias() = delta.transpose() * ws.acts[i];
    // Bias gradients reduce over the batch in double precision.
    ws.bias_acc.assign(l.out, 0.0);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (int o = 0; o < l.out; ++o) ws.bias_acc[o] += delta(r, o);
    }
    for (int o = 0; o < l.out; ++o) grads[l.bias_offset + o] = static_cast<T>(ws.bias_acc[o]);
    if (i == 0) break;
    auto& below = ws.deltas[i - 1];
    below.resize(n, l.in);
    below.noalias() = delta * WeightsOf(l, params);
    // ReLU subgradient at zero is zero.
    below.array() *= (ws.acts[i].array() > T(0)).template cast<T>();
  }
  return loss;
}

template void Forward<float>(const Topology&, std::span<const float>, float, float,
                             std::span<const float>, size_t, Workspace<float>&, std::span<float>);
template void Forward<double>(const Topology&, std::span<const double>, double, double,
                              std::span<const double>, size_t, Workspace<double>&,
                              std::span<double>);
template double Backward<float>(const Topology&, std::span<const float>, float, float,
                                std::span<const float>, std::span<const float>, size_t,
                                Workspace<float>&, std::span<float>);
template double Backward<double>(const Topology&, std::span<const double>, double, double,
                                 std::span<const double>, std::span<const double>, size_t,
                                 Workspace<double>&, std::span<double>);

namespace {

template <typename T>
double Mse(std::span<const T> pred, std::span<const T> target) {
  Require(!pred.empty(), "loss of an empty batch is undefined");
  Require(pred.size() == target.size(), "prediction/target length mismatch");
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

}  // namespace

double LossMse(std::span<const float> pred, std::span<const float> target) {
  return Mse(pred, target);
}
double LossMse(std::span<const double> pred, std::span<const double> target) {
  return Mse(pred, target);
}

std::vector<float> Predict(const MlpModel& model, std::span<const float> x, size_t rows) {
  constexpr size_t kBlock = 1024;
  const size_t cols = static_cast<size_t>(model.topology.input_dim());
  Require(x.size() == rows * cols, "input batch has the wrong number of columns");
  std::vector<float> out(rows);
  Workspace<float> ws;
  for (size_t start = 0; start < rows; start += kBlock) {
    const size_t n = std::min(kBlock, rows - start);
    Forward<float>(model.topology, model.params, model.input_shift, model.input_scale,
                   x.subspan(start * cols, n * cols), n, ws, std::span(out).subspan(start, n));
  }
  return out;
}

float PredictOne(const MlpModel& model, std::span<const float> x) {
  Require(x.size() == static_cast<size_t>(model.topology.input_dim()),
          "input has the wrong number of features");
  thread_local Workspace<float> ws;
  float y = 0.0f;
  Forward<float>(model.topology, model.params, model.input_shift, model.input_scale, x, 1, ws,
                 std::span(&y, 1));
  return y;
}

void AdamConfig::Validate() const {
  Require(learning_rate > 0.0, "learning rate must be positive");
  Require(beta1 > 0.0 && beta1 < 1.0, "beta1 must lie in (0, 1)");
  Require(beta2 > 0.0 && beta2 < 1.0, "beta2 must lie in (0, 1)");
  Require(epsilon > 0.0, "epsilon must be positive");
}

template <typename T>
void AdamStep(std::span<T> params, std::span<const T> grads, AdamMoments<T>& state,
              const AdamConfig& config) {
  Require(grads.size() == params.size(), "gradient/parameter size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), T(0));
    state.v.assign(params.size(), T(0));
  }
  Require(state.m.size() == params.size() && state.v.size() == params.size(),
          "optimizer state does not match the parameters");
  ++state.t;
  const T b1 = static_cast<T>(config.beta1);
  const T b2 = static_cast<T>(config.beta2);
  const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(config.beta1, static_cast<double>(state.t))));
  const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(config.beta2, static_cast<double>(state.t))));
  const T lr = static_cast<T>(config.learning_rate);
  const T eps = static_cast<T>(config.epsilon);
  T* m = state.m.data();
  T* v = state.v.data();
  for (size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    m[i] = b1 * m[i] + (T(1) - b1) * g;
    v[i] = b2 * v[i] + (T(1) - b2) * g * g;
    params[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

template void AdamStep<float>(std::span<float>, std::span<const float>, AdamMoments<float>&,
                              const AdamConfig&);
template void AdamStep<double>(std::span<double>, std::span<const double>, AdamMoments<double>&,
                               const AdamConfig&);

std::vector<uint8_t> SerializeModel(const MlpModel& model) {
  model.Validate();
  ByteWriter w;
  w.PutRaw("LDNN");
  w.Put<uint16_t>(kModelVersion);
  const auto& dims = model.topology.dims();
  w.Put<uint16_t>(static_cast<uint16_t>(dims.size()));
  for (int d : dims) w.Put<uint32_t>(static_cast<uint32_t>(d));
  w.Put<float>(model.input_shift);
  w.Put<float>(model.input_scale);
  for (const auto& l : model.topology.layers()) {
    w.PutSpan<float>(std::span(model.params).subspan(l.weight_offset, static_cast<size_t>(l.in) * l.out));
    w.PutSpan<float>(std::span(model.params).subspan(l.bias_offset, l.out));
  }
  const std::string meta = model.metadata.dump();
  w.Put<uint32_t>(static_cast<uint32_t>(meta.size()));
  w.PutRaw(meta);
  return std::move(w.bytes());
}

MlpModel DeserializeModel(std::span<const uint8_t> bytes, const std::string& what) {
  ByteReader r(bytes, what);
  if (r.GetRaw(4) != "LDNN") Fail(ErrorCode::kFormat, what + ": bad magic, expected LDNN");
  const auto version = r.Get<uint16_t>();
  if (version != kModelVersion) {
    Fail(ErrorCode::kFormat, what + ": unsupported model version " + std::to_string(version));
  }
  const auto n_dims = r.Get<uint16_t>();
  if (n_dims < 2 || n_dims > 64) Fail(ErrorCode::kFormat, what + ": implausible layer count");
  std::vector<int> dims(n_dims);
  for (auto& d : dims) {
    const auto v = r.Get<uint32_t>();
    if (v == 0 || v > (1u << 20)) Fail(ErrorCode::kFormat, what + ": implausible layer width");
    d = static_cast<int>(v);
  }
  MlpModel model;
  model.topology = Topology(dims);
  model.input_shift = r.Get<float>();
  model.input_scale = r.Get<float>();
  if (r.remaining() < model.topology.num_params() * sizeof(float)) {
    Fail(ErrorCode::kFormat, what + ": truncated parameters");
  }
  model.params.resize(model.topology.num_params());
  for (const auto& l : model.topology.layers()) {
    r.GetSpan<float>(std::span(model.params).subspan(l.weight_offset, static_cast<size_t>(l.in) * l.out));
    r.GetSpan<float>(std::span(model.params).subspan(l.bias_offset, l.out));
  }
  const auto meta_len = r.Get<uint32_t>();
  try {
    model.metadata = nlohmann::ordered_json::parse(r.GetRaw(meta_len));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormat, what + ": malformed metadata: " + e.what());
  }
  if (r.remaining() != 0) Fail(ErrorCode::kFormat, what + ": trailing bytes");
  try {
    model.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kFormat, what + ": " + e.what());
  }
  return model;
}

void SaveModel(const std::string& path, const MlpModel& model) {
  WriteFileBytes(path, SerializeModel(model));
}

MlpModel LoadModel(const std::string& path) { return DeserializeModel(ReadFileBytes(path), path); }

}  // namespace loudnet
