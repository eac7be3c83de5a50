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

#ifndef LOUDNET_CORE_ORACLE_HPP_
#define LOUDNET_CORE_ORACLE_HPP_

// Stationary excitation-pattern loudness model used as the label generator.
//
// Stages: outer/middle-ear transfer per band, level-independent roex
// excitation on an ERB-number grid, compressive specific loudness above an
// internal-noise floor, trapezoidal integration to sones, and inversion of the
// model's own 1-kHz loudness-growth curve to phons.

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frontend.hpp"

namespace loudnet {

// ERB-rate scale helpers (Glasberg & Moore).
double ErbHz(double hz);
double HzToCam(double hz);
double CamToHz(double cam);
// Rounded-exponential filter weight at normalised deviation g >= 0.
double RoexWeight(double p, double g);

// (frequency Hz, gain dB) pairs, interpolated linearly in log frequency and
// held constant beyond the table ends.
struct EarTransfer {
  std::vector<std::pair<double, double>> points;

  double GainDb(double hz) const;
  void Validate() const;

  static EarTransfer Default();
  static EarTransfer FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

struct OracleParams {
  double alpha = 0.2;
  // A = a_factor x internal-noise excitation at each grid point.
  double a_factor = 4.0;
  double cam_lo = 1.75;
  double cam_hi = 33.5;
  double cam_step = 0.25;
  double threshold_1k_spl = 2.0;
  double reference_max_spl = 130.0;
  // Internal-noise excitation in dB relative to the 1-kHz threshold excitation.
  std::vector<std::pair<double, double>> internal_noise_db = {
      {20.0, 25.0}, {50.0, 10.0}, {100.0, 5.0}, {250.0, 1.5}, {500.0, 0.0}};
  CalibrationSpec cal;
};

struct ExcitationPattern {
  double cam_lo = 0.0;
  double cam_step = 0.25;
  // Linear power normalised to the just-audible 1-kHz peak.
  std::vector<double> values;

  double CamAt(size_t i) const { return cam_lo + cam_step * static_cast<double>(i); }
};

struct LoudnessLabel {
  double phon = 0.0;
  double sone = 0.0;
};

inline constexpr double kMaxPhon = 130.0;

class Oracle {
 public:
  static Oracle Calibrate(EarTransfer ear = EarTransfer::Default(), OracleParams params = {});
  // Rebuilds a calibrated oracle from its cache; the embedded hash must match.
  static Oracle FromCache(const nlohmann::json& cache);
  nlohmann::ordered_json ToCache() const;

  SpectrumFrame ApplyEarTransfer(const SpectrumFrame& spectrum) const;
  // Expects a spectrum that already passed through ApplyEarTransfer.
  ExcitationPattern Excitation(const SpectrumFrame& eared) const;
  // Sones per Cam at each grid point.
  std::vector<double> SpecificLoudness(const ExcitationPattern& excitation) const;
  double TotalLoudness(std::span<const double> specific) const;
  double SonesToPhons(double sones) const;
  LoudnessLabel Loudness(const SpectrumFrame& spectrum) const;

  const OracleParams& params() const { return params_; }
  const EarTransfer& ear() const { return ear_; }
  double loudness_constant() const { return c_; }
  double excitation_norm() const { return norm_; }
  // Sones of a 1-kHz tone at 0, 1, ..., reference_max_spl dB.
  const std::vector<double>& reference_sones() const { return reference_sones_; }
  const std::vector<double>& internal_noise() const { return noise_; }
  size_t grid_size() const { return grid_fc_.size(); }
  std::string calibration_hash() const;

  static constexpr const char* kVersion = "loudnet-oracle-1";

 private:
  Oracle(EarTransfer ear, OracleParams params);
  void BuildGrid();
  double RawLoudness(const SpectrumFrame& spectrum) const;
  nlohmann::ordered_json CacheBody() const;

  EarTransfer ear_;
  OracleParams params_;
  std::vector<double> band_gain_db_;
  std::vector<double> band_hz_;
  std::vector<double> grid_fc_;
  std::vector<double> noise_;
  std::vector<double> a_;
  double norm_ = 1.0;
  double c_ = 1.0;
  std::vector<double> reference_sones_;
};

}  // namespace loudnet

#endif  // LOUDNET_CORE_ORACLE_HPP_
