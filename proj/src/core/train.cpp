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

#include "train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "error.hpp"
#include "util.hpp"

namespace loudnet {

namespace {

constexpr uint32_t kStateVersion = 1;

uint64_t ParamsHash(const MlpModel& model) {
  return Fnv1a64(std::span(reinterpret_cast<const uint8_t*>(model.params.data()),
                           model.params.size() * sizeof(float)));
}

}  // namespace

void TrainConfig::Validate() const {
  adam.Validate();
  Require(batch_size >= 1, "batch size must be at least 1");
  Require(!schedule.empty(), "epoch schedule is empty");
  for (int s : schedule) Require(s > 0, "schedule stages must be positive");
  Require(trend_window > 0, "trend window must be positive");
}

std::vector<int> TrainConfig::Checkpoints() const {
  std::vector<int> out;
  int total = 0;
  for (int s : schedule) out.push_back(total += s);
  return out;
}

int TrainConfig::TotalEpochs() const {
  return std::accumulate(schedule.begin(), schedule.end(), 0);
}

nlohmann::ordered_json TrainConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["learning_rate"] = adam.learning_rate;
  j["beta1"] = adam.beta1;
  j["beta2"] = adam.beta2;
  j["epsilon"] = adam.epsilon;
  j["batch_size"] = batch_size;
  j["schedule"] = schedule;
  j["shuffle_seed"] = shuffle_seed;
  return j;
}

TrainingSet MakeTrainingSet(std::span<const DatasetRecord> records) {
  TrainingSet set;
  set.rows = records.size();
  set.x.reserve(records.size() * kNumBands);
  set.y.reserve(records.size());
  for (const auto& r : records) {
    set.x.insert(set.x.end(), r.spectrum.levels.begin(), r.spectrum.levels.end());
    set.y.push_back(r.phon);
  }
  return set;
}

void SaveAdamState(const std::string& path, const AdamState& state, const MlpModel& model) {
  const size_t n = model.params.size();
  Require(state.moments.m.size() == n && state.moments.v.size() == n,
          "optimizer state does not match the model");
  ByteWriter w;
  w.PutRaw("LDAS");
  w.Put<uint32_t>(kStateVersion);
  w.Put<uint64_t>(n);
  w.Put<uint64_t>(state.moments.t);
  w.Put<uint32_t>(static_cast<uint32_t>(state.epoch));
  w.Put<uint64_t>(ParamsHash(model));
  w.PutSpan<float>(state.moments.m);
  w.PutSpan<float>(state.moments.v);
  WriteFileBytes(path, w.bytes());
}

AdamState LoadAdamState(const std::string& path, const MlpModel& model) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path);
  if (r.GetRaw(4) != "LDAS") Fail(ErrorCode::kFormat, path + ": bad magic, expected LDAS");
  if (r.Get<uint32_t>() != kStateVersion) Fail(ErrorCode::kFormat, path + ": unsupported version");
  const auto n = r.Get<uint64_t>();
  if (n != model.params.size()) {
    Fail(ErrorCode::kFormat, path + ": optimizer state is for a different topology");
  }
  AdamState state;
  state.moments.t = r.Get<uint64_t>();
  state.epoch = static_cast<int>(r.Get<uint32_t>());
  if (r.Get<uint64_t>() != ParamsHash(model)) {
    Fail(ErrorCode::kFormat, path + ": optimizer state does not belong to this model");
  }
  state.moments.m.resize(n);
  state.moments.v.resize(n);
  r.GetSpan<float>(state.moments.m);
  r.GetSpan<float>(state.moments.v);
  if (r.remaining() != 0) Fail(ErrorCode::kFormat, path + ": trailing bytes");
  return state;
}

Trainer::Trainer(MlpModel model, TrainingSet data, TrainConfig config, AdamState state)
    : model_(std::move(model)),
      data_(std::move(data)),
      config_(std::move(config)),
      state_(std::move(state)) {
  config_.Validate();
  model_.Validate();
  Require(data_.rows > 0, "training set is empty");
  Require(data_.rows <= UINT32_MAX, "training set too large");
  Require(data_.x.size() == data_.rows * static_cast<size_t>(model_.topology.input_dim()) &&
              data_.y.size() == data_.rows,
          "training set does not match the model input width");
  Require(model_.topology.output_dim() == 1, "trainer expects a scalar-output model");
  if (!state_.moments.m.empty()) {
    Require(state_.moments.m.size() == model_.params.size(),
            "optimizer state does not match the model");
  }
  grads_.resize(model_.params.size());
}

double Trainer::RunEpoch() {
  const size_t rows = data_.rows;
  const size_t cols = static_cast<size_t>(model_.topology.input_dim());
  // The permutation is rebuilt from the identity every epoch so a resumed run
  // sees exactly the batches an uninterrupted one would.
  order_.resize(rows);
  std::iota(order_.begin(), order_.end(), 0u);
  Rng rng(DeriveSeed(config_.shuffle_seed, static_cast<uint64_t>(state_.epoch)));
  for (size_t i = rows; i > 1; --i) std::swap(order_[i - 1], order_[rng.Below(i)]);

  const size_t bs = std::min(config_.batch_size, rows);
  batch_x_.resize(bs * cols);
  batch_y_.resize(bs);
  double weighted = 0.0;
  for (size_t start = 0; start < rows; start += bs) {
    const size_t n = std::min(bs, rows - start);
    for (size_t k = 0; k < n; ++k) {
      const uint32_t src = order_[start + k];
      std::copy_n(&data_.x[src * cols], cols, &batch_x_[k * cols]);
      batch_y_[k] = data_.y[src];
    }
    const double loss = Backward<float>(model_.topology, model_.params, model_.input_shift,
                                        model_.input_scale, std::span(batch_x_).first(n * cols),
                                        std::span(batch_y_).first(n), n, ws_, grads_);
    if (!std::isfinite(loss)) Fail(ErrorCode::kNumeric, "non-finite loss");
    AdamStep<float>(model_.params, grads_, state_.moments, config_.adam);
    weighted += loss * static_cast<double>(n);
  }
  return weighted / static_cast<double>(rows);
}

std::vector<EpochStats> Trainer::Run(int epochs, const EpochCallback& on_epoch) {
  Require(epochs >= 0, "epoch count must be non-negative");
  std::vector<EpochStats> out;
  for (int e = 0; e < epochs; ++e) {
    const auto params_snapshot = model_.params;
    const auto state_snapshot = state_;
    const auto t0 = std::chrono::steady_clock::now();
    double loss = 0.0;
    try {
      loss = RunEpoch();
      for (float p : model_.params) {
        if (!std::isfinite(p)) Fail(ErrorCode::kNumeric, "non-finite parameters");
      }
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNumeric) throw;
      model_.params = params_snapshot;
      state_ = state_snapshot;
      Fail(ErrorCode::kNumeric, "training diverged in epoch " + std::to_string(state_.epoch + 1) +
                                    " (" + err.what() + "); model restored to epoch " +
                                    std::to_string(state_.epoch));
    }
    ++state_.epoch;
    EpochStats stats;
    stats.epoch = state_.epoch;
    stats.loss = loss;
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log_.push_back(stats);
    out.push_back(stats);

    const size_t w = static_cast<size_t>(config_.trend_window);
    if (log_.size() > w && log_.back().loss > log_[log_.size() - 1 - w].loss) {
      warnings_.push_back("loss rose over the " + std::to_string(w) + " epochs ending at epoch " +
                          std::to_string(stats.epoch) + ": " +
                          FormatFixed(log_[log_.size() - 1 - w].loss, 6) + " -> " +
                          FormatFixed(stats.loss, 6));
    }
    model_.metadata["epochs"] = state_.epoch;
    model_.metadata["train"] = config_.ToJson();
    if (on_epoch && !on_epoch(stats)) break;
  }
  return out;
}

std::string CheckpointPath(const std::string& dir, int epoch) {
  return (std::filesystem::path(dir) / ("model_e" + std::to_string(epoch) + ".ldnn")).string();
}

void SaveCheckpoint(const std::string& dir, const Trainer& trainer) {
  const std::string path = CheckpointPath(dir, trainer.epoch());
  SaveModel(path, trainer.model());
  SaveAdamState(path.substr(0, path.size() - 5) + ".ldas", trainer.state(), trainer.model());
}

}  // namespace loudnet
