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

#include "eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "train.hpp"
#include "util.hpp"

namespace loudnet {

namespace {

struct Accum {
  uint64_t n = 0;
  double sum = 0.0, sum_sq = 0.0, max_abs = 0.0;

  void Add(double d) {
    ++n;
    sum += d;
    sum_sq += d * d;
    max_abs = std::max(max_abs, std::abs(d));
  }
  ErrorStats Finish(std::string name) const {
    ErrorStats s;
    s.name = std::move(name);
    s.count = n;
    s.rms = std::sqrt(sum_sq / static_cast<double>(n));
    s.mean_signed = sum / static_cast<double>(n);
    s.max_abs = max_abs;
    return s;
  }
};

nlohmann::ordered_json StatsJson(const ErrorStats& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["rms_phon"] = s.rms;
  j["mean_signed_phon"] = s.mean_signed;
  j["max_abs_phon"] = s.max_abs;
  return j;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Spends `budget_s` in short windows and returns the median window rate, so a
// scheduler hiccup in one window does not drag the figure down.
template <typename Step>
double MedianWindowRate(double budget_s, Step&& step) {
  const double window = std::clamp(budget_s / 16.0, 0.01, 0.1);
  std::vector<double> rates;
  const auto start = std::chrono::steady_clock::now();
  do {
    uint64_t n = 0;
    const auto t0 = std::chrono::steady_clock::now();
    double dt = 0.0;
    do {
      n += step();
    } while ((dt = Seconds(t0)) < window);
    rates.push_back(static_cast<double>(n) / dt);
  } while (Seconds(start) < budget_s);
  auto mid = rates.begin() + rates.size() / 2;
  std::nth_element(rates.begin(), mid, rates.end());
  return *mid;
}

}  // namespace

const ErrorStats* ErrorReport::Find(const std::string& name) const {
  if (name == "overall") return &overall;
  for (const auto& c : categories) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::ordered_json ErrorReport::ToJson() const {
  nlohmann::ordered_json j;
  j["clamp_floor_phon"] = 0.0;
  j["overall"] = StatsJson(overall);
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (const auto& c : categories) cats[c.name] = StatsJson(c);
  j["categories"] = cats;
  return j;
}

ErrorReport ComputeErrors(std::span<const float> predictions,
                          std::span<const DatasetRecord> records) {
  Require(!records.empty(), "cannot evaluate an empty dataset");
  Require(predictions.size() == records.size(), "one prediction per record required");
  std::array<Accum, kNumCategories> per;
  Accum all;
  for (size_t i = 0; i < records.size(); ++i) {
    const double pred = std::max(0.0, static_cast<double>(predictions[i]));
    const double d = pred - records[i].phon;
    per[static_cast<size_t>(records[i].category)].Add(d);
    all.Add(d);
  }
  ErrorReport report;
  for (int c = 0; c < kNumCategories; ++c) {
    if (per[c].n > 0) report.categories.push_back(per[c].Finish(CategoryName(static_cast<Category>(c))));
  }
  report.overall = all.Finish("overall");
  return report;
}

ErrorReport RmsError(const MlpModel& model, std::span<const DatasetRecord> records) {
  Require(!records.empty(), "cannot evaluate an empty dataset");
  const auto set = MakeTrainingSet(records);
  return ComputeErrors(Predict(model, set.x, set.rows), records);
}

double Histogram::ModeCenter() const {
  Require(!proportions.empty(), "empty histogram");
  const auto it = std::max_element(proportions.begin(), proportions.end());
  return origin + (static_cast<double>(it - proportions.begin()) + 0.5) * bin_width;
}

std::string Histogram::ToCsv() const {
  std::string out = "phon_lo,phon_hi,proportion\n";
  for (size_t i = 0; i < proportions.size(); ++i) {
    const double lo = origin + static_cast<double>(i) * bin_width;
    out += FormatFixed(lo, 3) + "," + FormatFixed(lo + bin_width, 3) + "," +
           FormatFixed(proportions[i], 9) + "\n";
  }
  return out;
}

Histogram LoudnessHistogram(std::span<const float> values, double bin_width) {
  Require(bin_width > 0.0, "histogram bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  if (values.empty()) return h;
  double lo = INFINITY, hi = -INFINITY;
  for (float v : values) {
    Require(std::isfinite(v), "histogram input must be finite");
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  h.origin = std::floor(lo / bin_width) * bin_width;
  const size_t n_bins = static_cast<size_t>(std::floor((hi - h.origin) / bin_width)) + 1;
  std::vector<uint64_t> counts(n_bins, 0);
  for (float v : values) {
    const auto b = static_cast<size_t>(std::floor((v - h.origin) / bin_width));
    ++counts[std::min(b, n_bins - 1)];
  }
  h.proportions.resize(n_bins);
  for (size_t i = 0; i < n_bins; ++i) {
    h.proportions[i] = static_cast<double>(counts[i]) / static_cast<double>(values.size());
  }
  return h;
}

Predictor ModelPredictor(const MlpModel& model) {
  return [&model](std::span<const SpectrumFrame> frames) {
    std::vector<float> x;
    x.reserve(frames.size() * kNumBands);
    for (const auto& f : frames) x.insert(x.end(), f.levels.begin(), f.levels.end());
    const auto raw = Predict(model, x, frames.size());
    std::vector<double> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) out[i] = std::max(0.0, static_cast<double>(raw[i]));
    return out;
  };
}

Predictor OraclePredictor(const Oracle& oracle) {
  return [&oracle](std::span<const SpectrumFrame> frames) {
    std::vector<double> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(oracle.Loudness(f).phon);
    return out;
  };
}

std::vector<double> ToneCurveLevels() {
  std::vector<double> levels;
  for (int l = 0; l <= 100; l += 5) levels.push_back(l);
  return levels;
}

std::vector<double> BandwidthSweep() {
  std::vector<double> bw;
  for (int k = 0; k < 10; ++k) bw.push_back(12.5 * std::ldexp(1.0, k));
  return bw;
}

std::vector<CurveSeries> ToneGrowthCurves(const Predictor& predict, const std::string& prefix,
                                          std::span<const double> freqs,
                                          std::span<const double> levels) {
  const auto default_levels = ToneCurveLevels();
  if (levels.empty()) levels = default_levels;
  std::vector<CurveSeries> out;
  for (double hz : freqs) {
    std::vector<SpectrumFrame> frames;
    for (double l : levels) frames.push_back(PureToneFrame(hz, l));
    CurveSeries s;
    s.label = prefix + "_" + FormatFixed(hz, 0) + "hz";
    s.x.assign(levels.begin(), levels.end());
    s.y = predict(frames);
    out.push_back(std::move(s));
  }
  return out;
}

SpectrumFrame PinkNoiseFrame(double center_hz, double bandwidth_hz, double level_spl) {
  NoiseSpec spec;
  spec.center_hz = center_hz;
  spec.bandwidth_hz = bandwidth_hz;
  spec.level_spl = level_spl;
  spec.gradient_db_per_octave = -10.0 * std::log10(2.0);
  return NoiseSpectrum(spec);
}

CurveSeries BandwidthCurve(const Predictor& predict, const std::string& label,
                           std::span<const double> bandwidths, double center_hz,
                           double level_spl) {
  const auto default_bw = BandwidthSweep();
  if (bandwidths.empty()) bandwidths = default_bw;
  std::vector<SpectrumFrame> frames;
  for (double bw : bandwidths) frames.push_back(PinkNoiseFrame(center_hz, bw, level_spl));
  CurveSeries s;
  s.label = label;
  s.x.assign(bandwidths.begin(), bandwidths.end());
  s.y = predict(frames);
  return s;
}

std::string CurvesCsv(const std::string& x_name, std::span<const CurveSeries> series) {
  Require(!series.empty(), "no curves to write");
  const auto& x = series.front().x;
  for (const auto& s : series) {
    Require(s.x == x && s.y.size() == x.size(), "curve series must share the x grid");
  }
  std::string out = x_name;
  for (const auto& s : series) out += "," + s.label;
  out += "\n";
  for (size_t i = 0; i < x.size(); ++i) {
    out += FormatFixed(x[i], 3);
    for (const auto& s : series) out += "," + FormatFixed(s.y[i], 4);
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json BenchReport::ToJson() const {
  nlohmann::ordered_json j;
  j["dnn_batched_per_s"] = batched_rate;
  j["dnn_single_per_s"] = single_rate;
  j["oracle_per_s"] = oracle_rate;
  j["speedup"] = speedup;
  j["batch_size"] = batch_size;
  j["duration_s"] = duration_s;
  j["threads"] = 1;
  j["hardware"] = hardware;
  return j;
}

std::string HardwareNote() {
  std::string cpu = "unknown cpu";
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(line.find_first_not_of(' ', colon + 1));
      break;
    }
  }
  std::string simd = "generic";
#if defined(__AVX512F__)
  simd = "avx512";
#elif defined(__AVX2__)
  simd = "avx2";
#elif defined(__SSE4_2__)
  simd = "sse4.2";
#endif
  std::ostringstream os;
  os << cpu << "; single thread; simd " << simd;
#if defined(__VERSION__)
  os << "; compiler " << __VERSION__;
#endif
  return os.str();
}

BenchReport BenchThroughput(const MlpModel& model, const Oracle& oracle, double duration_s,
                            uint64_t seed, size_t batch_size) {
  Require(duration_s > 0.0, "benchmark duration must be positive");
  Require(batch_size > 0, "benchmark batch size must be positive");
  model.Validate();
  // Fixed, realistic inputs: a mix of plain and notched noise spectra.
  Rng rng(seed);
  std::vector<SpectrumFrame> frames(batch_size);
  std::vector<float> x;
  x.reserve(batch_size * kNumBands);
  for (size_t i = 0; i < batch_size; ++i) {
    frames[i] = NoiseSpectrum(SampleNoiseSpec(rng, i % 2 == 1));
    x.insert(x.end(), frames[i].levels.begin(), frames[i].levels.end());
  }
  BenchReport r;
  r.batch_size = batch_size;
  r.duration_s = duration_s;
  r.hardware = HardwareNote();

  Workspace<float> ws;
  std::vector<float> out(batch_size);
  auto forward = [&] {
    Forward<float>(model.topology, model.params, model.input_shift, model.input_scale, x,
                   batch_size, ws, out);
  };
  forward();  // warm-up, sizes the workspace
  volatile float sink = 0.0f;

  uint64_t k = 0;
  r.batched_rate = MedianWindowRate(0.5 * duration_s, [&]() -> uint64_t {
    forward();
    sink = sink + out[k++ % batch_size];
    return batch_size;
  });
  r.single_rate = MedianWindowRate(0.25 * duration_s, [&]() -> uint64_t {
    for (size_t i = 0; i < 64; ++i, ++k) {
      sink = sink + PredictOne(model, std::span(x).subspan((k % batch_size) * kNumBands, kNumBands));
    }
    return 64;
  });
  r.oracle_rate = MedianWindowRate(0.25 * duration_s, [&]() -> uint64_t {
    for (size_t i = 0; i < 16; ++i, ++k) {
      sink = sink + static_cast<float>(oracle.Loudness(frames[k % batch_size]).phon);
    }
    return 16;
  });
  r.speedup = r.batched_rate / r.oracle_rate;
  return r;
}

}  // namespace loudnet
