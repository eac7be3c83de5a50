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

#ifndef LOUDNET_CORE_TRAIN_HPP_
#define LOUDNET_CORE_TRAIN_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mlp.hpp"
#include "synth.hpp"

namespace loudnet {

struct TrainConfig {
  AdamConfig adam;
  size_t batch_size = 256;
  // Epochs per stage; a checkpoint is written at the end of every stage.
  std::vector<int> schedule = {220, 780, 4000};
  uint64_t shuffle_seed = 1;
  // Width of the window for the loss-trend soft check.
  int trend_window = 50;

  void Validate() const;
  // Cumulative epoch numbers at the stage boundaries, e.g. 220, 1000, 5000.
  std::vector<int> Checkpoints() const;
  int TotalEpochs() const;
  nlohmann::ordered_json ToJson() const;
};

// Dense row-major copy of the inputs and targets.
struct TrainingSet {
  std::vector<float> x;
  std::vector<float> y;
  size_t rows = 0;
};
TrainingSet MakeTrainingSet(std::span<const DatasetRecord> records);

struct EpochStats {
  int epoch = 0;  // 1-based, counted from the start of training
  double loss = 0.0;  // mean over the epoch's mini-batches, pre-update
  double seconds = 0.0;
};

// Optimizer moments plus the number of completed epochs.
struct AdamState {
  AdamMoments<float> moments;
  int epoch = 0;
};

// "LDAS" sidecar. Holds a hash of the model parameters it belongs to so a
// state file cannot silently be paired with the wrong model.
void SaveAdamState(const std::string& path, const AdamState& state, const MlpModel& model);
AdamState LoadAdamState(const std::string& path, const MlpModel& model);

class Trainer {
 public:
  // Returning false from the callback stops after the current epoch.
  using EpochCallback = std::function<bool(const EpochStats&)>;

  Trainer(MlpModel model, TrainingSet data, TrainConfig config, AdamState state = {});

  // Runs up to `epochs` further epochs. If the loss turns non-finite the model
  // and optimizer are rolled back to the start of the failing epoch and a
  // numeric Error is thrown.
  std::vector<EpochStats> Run(int epochs, const EpochCallback& on_epoch = {});

  const MlpModel& model() const { return model_; }
  const AdamState& state() const { return state_; }
  int epoch() const { return state_.epoch; }
  const TrainConfig& config() const { return config_; }
  const std::vector<EpochStats>& log() const { return log_; }
  // Soft-check findings: epochs whose loss exceeded the loss one window earlier.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  double RunEpoch();

  MlpModel model_;
  TrainingSet data_;
  TrainConfig config_;
  AdamState state_;
  std::vector<EpochStats> log_;
  std::vector<std::string> warnings_;
  std::vector<uint32_t> order_;
  std::vector<float> batch_x_, batch_y_, grads_;
  Workspace<float> ws_;
};

// Writes model_e{N}.ldnn and model_e{N}.ldas into dir.
std::string CheckpointPath(const std::string& dir, int epoch);
void SaveCheckpoint(const std::string& dir, const Trainer& trainer);

}  // namespace loudnet

#endif  // LOUDNET_CORE_TRAIN_HPP_
