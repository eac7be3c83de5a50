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

#ifndef LOUDNET_CORE_EVAL_HPP_
#define LOUDNET_CORE_EVAL_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "frontend.hpp"
#include "mlp.hpp"
#include "oracle.hpp"
#include "synth.hpp"

namespace loudnet {

struct ErrorStats {
  std::string name;
  uint64_t count = 0;
  double rms = 0.0;
  double mean_signed = 0.0;  // prediction minus label
  double max_abs = 0.0;
};

struct ErrorReport {
  std::vector<ErrorStats> categories;  // only categories with records
  ErrorStats overall;

  const ErrorStats* Find(const std::string& name) const;
  nlohmann::ordered_json ToJson() const;
};

// Predictions are clamped at 0 phon before differencing.
ErrorReport ComputeErrors(std::span<const float> predictions,
                          std::span<const DatasetRecord> records);
ErrorReport RmsError(const MlpModel& model, std::span<const DatasetRecord> records);

struct Histogram {
  double bin_width = 1.0;
  double origin = 0.0;  // lower edge of the first bin
  std::vector<double> proportions;

  double ModeCenter() const;
  std::string ToCsv() const;
};
Histogram LoudnessHistogram(std::span<const float> values, double bin_width = 1.0);

struct CurveSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Maps a batch of spectra to clamped phon values.
using Predictor = std::function<std::vector<double>(std::span<const SpectrumFrame>)>;
Predictor ModelPredictor(const MlpModel& model);
Predictor OraclePredictor(const Oracle& oracle);

inline const std::vector<double> kToneCurveFrequencies = {100.0, 1000.0, 3000.0};
std::vector<double> ToneCurveLevels();  // 0..100 dB in 5-dB steps
// Geometric bandwidth sweep for the pink-noise curve, 12.5 Hz .. 6.4 kHz.
std::vector<double> BandwidthSweep();

std::vector<CurveSeries> ToneGrowthCurves(const Predictor& predict, const std::string& prefix,
                                          std::span<const double> freqs = kToneCurveFrequencies,
                                          std::span<const double> levels = {});
// Pink noise (-3.01 dB/octave), geometric centring.
SpectrumFrame PinkNoiseFrame(double center_hz, double bandwidth_hz, double level_spl);
CurveSeries BandwidthCurve(const Predictor& predict, const std::string& label,
                           std::span<const double> bandwidths = {}, double center_hz = 1000.0,
                           double level_spl = 60.0);

// Wide CSV: one x column then one column per series. All series must share x.
std::string CurvesCsv(const std::string& x_name, std::span<const CurveSeries> series);

struct BenchReport {
  double batched_rate = 0.0;  // frames/s, batch of batch_size
  double single_rate = 0.0;   // frames/s, one frame per call
  double oracle_rate = 0.0;   // evaluations/s
  double speedup = 0.0;       // batched_rate / oracle_rate
  size_t batch_size = 1024;
  double duration_s = 0.0;
  std::string hardware;

  nlohmann::ordered_json ToJson() const;
};

// Splits the duration 50/25/25 over the batched, single-frame and oracle
// measurements, all on the calling thread.
BenchReport BenchThroughput(const MlpModel& model, const Oracle& oracle, double duration_s,
                            uint64_t seed = 1, size_t batch_size = 1024);
std::string HardwareNote();

}  // namespace loudnet

#endif  // LOUDNET_CORE_EVAL_HPP_
