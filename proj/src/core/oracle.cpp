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

#include "oracle.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "util.hpp"

namespace loudnet {

namespace {

double InterpLogFrequency(const std::vector<std::pair<double, double>>& table, double hz) {
  if (hz <= table.front().first) return table.front().second;
  if (hz >= table.back().first) return table.back().second;
  auto hi = std::upper_bound(table.begin(), table.end(), hz,
                             [](double f, const auto& p) { return f < p.first; });
  auto lo = hi - 1;
  const double t = std::log(hz / lo->first) / std::log(hi->first / lo->first);
  return lo->second + t * (hi->second - lo->second);
}

}  // namespace

double ErbHz(double hz) { return 24.7 * (4.37 * hz / 1000.0 + 1.0); }
double HzToCam(double hz) { return 21.4 * std::log10(4.37 * hz / 1000.0 + 1.0); }
double CamToHz(double cam) { return (std::pow(10.0, cam / 21.4) - 1.0) / 4.37 * 1000.0; }

double RoexWeight(double p, double g) {
  const double pg = p * g;
  return (1.0 + pg) * std::exp(-pg);
}

double EarTransfer::GainDb(double hz) const { return InterpLogFrequency(points, hz); }

void EarTransfer::Validate() const {
  Require(points.size() >= 2, "ear transfer table needs at least two points");
  for (size_t i = 0; i < points.size(); ++i) {
    Require(points[i].first > 0 && std::isfinite(points[i].second),
            "ear transfer entries must have positive frequency and finite gain");
    if (i > 0) {
      Require(points[i].first > points[i - 1].first,
              "ear transfer frequencies must be strictly increasing");
    }
  }
  Require(points.front().first <= 20.0 && points.back().first >= 8000.0,
          "ear transfer table must cover 20 Hz to 8 kHz");
}

// Free-field frontal incidence to the cochlea, relative to 1 kHz. Shaped after
// published outer+middle-ear responses: steep low-frequency roll-off, a
// broad ear-canal resonance near 3 kHz.
EarTransfer EarTransfer::Default() {
  return EarTransfer{{{20.0, -39.0},  {25.0, -33.0},  {31.5, -28.0}, {40.0, -24.0},
                      {50.0, -21.0},  {63.0, -19.0},  {80.0, -17.5}, {100.0, -16.0},
                      {125.0, -13.0}, {160.0, -10.5}, {200.0, -8.0}, {250.0, -6.0},
                      {315.0, -4.5},  {400.0, -3.0},  {500.0, -2.0}, {630.0, -1.0},
                      {750.0, -0.5},  {800.0, -0.4},  {1000.0, 0.0}, {1250.0, 0.5},
                      {1600.0, 1.5},  {2000.0, 3.5},  {2500.0, 5.5}, {3000.0, 6.5},
                      {3150.0, 6.5},  {4000.0, 5.0},  {5000.0, 2.5}, {6300.0, -1.0},
                      {8000.0, -4.0}}};
}

EarTransfer EarTransfer::FromJson(const nlohmann::json& j) {
  EarTransfer ear;
  const auto& list = j.is_object() && j.contains("points") ? j.at("points") : j;
  if (!list.is_array()) Fail(ErrorCode::kFormat, "ear transfer JSON must be a list of [hz, db] pairs");
  try {
    for (const auto& item : list) {
      if (item.is_array() && item.size() == 2) {
        ear.points.emplace_back(item[0].get<double>(), item[1].get<double>());
      } else if (item.is_object()) {
        ear.points.emplace_back(item.at("hz").get<double>(), item.at("db").get<double>());
      } else {
        Fail(ErrorCode::kFormat, "ear transfer entries must be [hz, db] or {hz, db}");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("ear transfer table: ") + e.what());
  }
  ear.Validate();
  return ear;
}

nlohmann::json EarTransfer::ToJson() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [hz, db] : points) list.push_back({hz, db});
  return list;
}

Oracle::Oracle(EarTransfer ear, OracleParams params)
    : ear_(std::move(ear)), params_(std::move(params)) {
  ear_.Validate();
  params_.cal.Validate();
  Require(params_.alpha > 0 && params_.alpha < 1, "alpha must lie in (0, 1)");
  Require(params_.a_factor > 0, "a_factor must be positive");
  Require(params_.cam_step > 0 && params_.cam_hi > params_.cam_lo && params_.cam_lo > 0,
          "invalid ERB-number grid");
  Require(!params_.internal_noise_db.empty(), "internal-noise table is empty");
  BuildGrid();
}

void Oracle::BuildGrid() {
  const auto& plan = CanonicalPlan();
  band_hz_.resize(kNumBands);
  band_gain_db_.resize(kNumBands);
  for (int b = 0; b < kNumBands; ++b) {
    band_hz_[b] = plan.center(b);
    band_gain_db_[b] = ear_.GainDb(band_hz_[b]);
  }
  const auto n = static_cast<size_t>(
      std::floor((params_.cam_hi - params_.cam_lo) / params_.cam_step + 1e-9)) + 1;
  grid_fc_.resize(n);
  noise_.resize(n);
  a_.resize(n);
  for (size_t j = 0; j < n; ++j) {
    grid_fc_[j] = CamToHz(params_.cam_lo + params_.cam_step * static_cast<double>(j));
    noise_[j] = std::pow(10.0, InterpLogFrequency(params_.internal_noise_db, grid_fc_[j]) / 10.0);
    a_[j] = params_.a_factor * noise_[j];
  }
}

SpectrumFrame Oracle::ApplyEarTransfer(const SpectrumFrame& spectrum) const {
  SpectrumFrame out;
  const double floor = params_.cal.floor_spl;
  for (int b = 0; b < kNumBands; ++b) {
    const double shifted = spectrum.levels[b] + band_gain_db_[b];
    out.levels[b] = static_cast<float>(std::clamp(shifted, floor, kMaxBandSpl));
  }
  return out;
}

ExcitationPattern Oracle::Excitation(const SpectrumFrame& eared) const {
  std::array<double, kNumBands> power;
  for (int b = 0; b < kNumBands; ++b) power[b] = std::pow(10.0, eared.levels[b] / 10.0);
  ExcitationPattern e;
  e.cam_lo = params_.cam_lo;
  e.cam_step = params_.cam_step;
  e.values.resize(grid_fc_.size());
  for (size_t j = 0; j < grid_fc_.size(); ++j) {
    const double fc = grid_fc_[j];
    const double p = 4.0 * fc / ErbHz(fc);
    double sum = 0.0;
    for (int b = 0; b < kNumBands; ++b) {
      sum += power[b] * RoexWeight(p, std::abs(band_hz_[b] - fc) / fc);
    }
    e.values[j] = sum / norm_;
  }
  return e;
}

std::vector<double> Oracle::SpecificLoudness(const ExcitationPattern& excitation) const {
  Require(excitation.values.size() == grid_fc_.size(), "excitation grid size mismatch");
  std::vector<double> out(excitation.values.size());
  const double alpha = params_.alpha;
  for (size_t j = 0; j < out.size(); ++j) {
    const double e = excitation.values[j];
    Require(std::isfinite(e) && e >= 0.0, "excitation must be finite and non-negative");
    const double excess = std::max(e - noise_[j], 0.0);
    out[j] = c_ * (std::pow(excess + a_[j], alpha) - std::pow(a_[j], alpha));
  }
  return out;
}

double Oracle::TotalLoudness(std::span<const double> specific) const {
  if (specific.size() < 2) return 0.0;
  double sum = 0.5 * (specific.front() + specific.back());
  for (size_t j = 1; j + 1 < specific.size(); ++j) sum += specific[j];
  return std::max(0.0, sum * params_.cam_step);
}

double Oracle::RawLoudness(const SpectrumFrame& spectrum) const {
  return TotalLoudness(SpecificLoudness(Excitation(ApplyEarTransfer(spectrum))));
}

double Oracle::SonesToPhons(double sones) const {
  if (!(sones >= 0.0)) Fail(ErrorCode::kInvalidArgument, "negative or NaN loudness");
  if (sones == 0.0) return 0.0;
  const auto& s = reference_sones_;
  const auto it = std::lower_bound(s.begin(), s.end(), sones);
  const size_t i = static_cast<size_t>(it - s.begin());
  double phon;
  if (i == 0) {
    phon = 0.0;
  } else {
    // Past the table end the last segment is extended.
    const size_t hi = std::min(i, s.size() - 1);
    const double s0 = s[hi - 1];
    const double s1 = s[hi];
    const double l0 = static_cast<double>(hi - 1);
    if (s0 > 0.0) {
      phon = l0 + std::log(sones / s0) / std::log(s1 / s0);
    } else {
      phon = l0 + (sones - s0) / (s1 - s0);
    }
  }
  return std::clamp(phon, 0.0, kMaxPhon);
}

LoudnessLabel Oracle::Loudness(const SpectrumFrame& spectrum) const {
  LoudnessLabel label;
  label.sone = RawLoudness(spectrum);
  label.phon = SonesToPhons(label.sone);
  return label;
}

Oracle Oracle::Calibrate(EarTransfer ear, OracleParams params) {
  Oracle o(std::move(ear), std::move(params));
  const auto& cal = o.params_.cal;
  const double target = o.params_.threshold_1k_spl;

  // Excitation normalisation: the just-audible 1-kHz tone peaks at 1.0.
  o.norm_ = 1.0;
  const auto raw = o.Excitation(o.ApplyEarTransfer(PureToneFrame(1000.0, target, cal)));
  o.norm_ = *std::max_element(raw.values.begin(), raw.values.end());
  if (!(o.norm_ > 0.0) || !std::isfinite(o.norm_)) {
    Fail(ErrorCode::kNumeric, "calibration: degenerate 1-kHz threshold excitation");
  }

  // Confirm the detection threshold by bisection on the audible/inaudible edge.
  o.c_ = 1.0;
  double lo = target - 20.0;
  double hi = target + 20.0;
  auto audible = [&](double level) {
    return o.RawLoudness(PureToneFrame(1000.0, level, cal)) > 0.0;
  };
  if (audible(lo) || !audible(hi)) {
    Fail(ErrorCode::kNumeric, "calibration: 1-kHz threshold not bracketed in [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "] dB");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (audible(mid) ? hi : lo) = mid;
  }
  if (std::abs(hi - target) > 0.01) {
    Fail(ErrorCode::kNumeric, "calibration: threshold search converged to " +
                                  std::to_string(hi) + " dB, target " + std::to_string(target));
  }

  const double sones40 = o.RawLoudness(PureToneFrame(1000.0, 40.0, cal));
  if (!(sones40 > 0.0) || !std::isfinite(sones40)) {
    Fail(ErrorCode::kNumeric, "calibration: 40-dB reference tone has no loudness");
  }
  o.c_ = 1.0 / sones40;

  const int top = static_cast<int>(std::lround(o.params_.reference_max_spl));
  o.reference_sones_.resize(top + 1);
  for (int level = 0; level <= top; ++level) {
    o.reference_sones_[level] = o.RawLoudness(PureToneFrame(1000.0, level, cal));
  }
  for (size_t i = 1; i < o.reference_sones_.size(); ++i) {
    if (o.reference_sones_[i] < o.reference_sones_[i - 1]) {
      Fail(ErrorCode::kNumeric, "calibration: reference curve not monotone at " +
                                    std::to_string(i) + " dB");
    }
  }
  return o;
}

nlohmann::ordered_json Oracle::CacheBody() const {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  nlohmann::json noise = nlohmann::json::array();
  for (const auto& [hz, db] : params_.internal_noise_db) noise.push_back({hz, db});
  j["params"] = {{"alpha", params_.alpha},
                 {"a_factor", params_.a_factor},
                 {"cam_lo", params_.cam_lo},
                 {"cam_hi", params_.cam_hi},
                 {"cam_step", params_.cam_step},
                 {"threshold_1k_spl", params_.threshold_1k_spl},
                 {"reference_max_spl", params_.reference_max_spl},
                 {"internal_noise_db", noise},
                 {"full_scale_spl", params_.cal.full_scale_spl},
                 {"floor_spl", params_.cal.floor_spl}};
  j["ear_transfer"] = ear_.ToJson();
  j["excitation_norm"] = norm_;
  j["loudness_constant"] = c_;
  j["reference_sones"] = reference_sones_;
  return j;
}

nlohmann::ordered_json Oracle::ToCache() const {
  auto j = CacheBody();
  j["hash"] = calibration_hash();
  return j;
}

std::string Oracle::calibration_hash() const { return HexU64(Fnv1a64(CacheBody().dump())); }

Oracle Oracle::FromCache(const nlohmann::json& cache) {
  try {
    if (cache.at("version").get<std::string>() != kVersion) {
      Fail(ErrorCode::kFormat, "oracle cache version mismatch");
    }
    const auto& p = cache.at("params");
    OracleParams params;
    params.alpha = p.at("alpha").get<double>();
    params.a_factor = p.at("a_factor").get<double>();
    params.cam_lo = p.at("cam_lo").get<double>();
    params.cam_hi = p.at("cam_hi").get<double>();
    params.cam_step = p.at("cam_step").get<double>();
    params.threshold_1k_spl = p.at("threshold_1k_spl").get<double>();
    params.reference_max_spl = p.at("reference_max_spl").get<double>();
    params.internal_noise_db.clear();
    for (const auto& item : p.at("internal_noise_db")) {
      params.internal_noise_db.emplace_back(item[0].get<double>(), item[1].get<double>());
    }
    params.cal.full_scale_spl = p.at("full_scale_spl").get<double>();
    params.cal.floor_spl = p.at("floor_spl").get<double>();
    Oracle o(EarTransfer::FromJson(cache.at("ear_transfer")), params);
    o.norm_ = cache.at("excitation_norm").get<double>();
    o.c_ = cache.at("loudness_constant").get<double>();
    o.reference_sones_ = cache.at("reference_sones").get<std::vector<double>>();
    if (o.reference_sones_.size() < 2) Fail(ErrorCode::kFormat, "oracle cache: short reference curve");
    if (o.calibration_hash() != cache.at("hash").get<std::string>()) {
      Fail(ErrorCode::kFormat, "oracle cache hash mismatch");
    }
    return o;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("oracle cache: ") + e.what());
  }
}

}  // namespace loudnet
