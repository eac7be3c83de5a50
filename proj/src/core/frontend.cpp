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

#include "frontend.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "error.hpp"

namespace loudnet {

namespace {

// FFTW's planner is not re-entrant; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

double BinningPlan::center(int band) const {
  if (band < n_linear) return 0.5 * (edges[band] + edges[band + 1]);
  return std::sqrt(edges[band] * edges[band + 1]);
}

int BinningPlan::BandOf(double hz) const {
  if (hz < edges.front() || hz >= edges.back()) return -1;
  auto it = std::upper_bound(edges.begin(), edges.end(), hz);
  return static_cast<int>(it - edges.begin()) - 1;
}

BinningPlan BuildBinningPlan(double limit_hz) {
  Require(std::isfinite(limit_hz) && limit_hz > kLinearLimitHz,
          "binning limit must lie above 200 Hz, got " + std::to_string(limit_hz));
  const double octaves = std::log2(limit_hz / kLinearLimitHz);
  BinningPlan plan;
  plan.n_log = static_cast<int>(std::ceil(9.0 * octaves - 1e-9));
  plan.n_linear = kNumBands - plan.n_log;
  Require(plan.n_log >= 1 && plan.n_linear >= 1,
          "binning limit " + std::to_string(limit_hz) + " Hz cannot yield 61 bands");
  plan.edges.reserve(kNumBands + 1);
  const double width = kLinearLimitHz / plan.n_linear;
  for (int k = 0; k < plan.n_linear; ++k) plan.edges.push_back(k * width);
  for (int k = 0; k <= plan.n_log; ++k) {
    plan.edges.push_back(kLinearLimitHz * std::pow(2.0, k / 9.0));
  }
  return plan;
}

const BinningPlan& CanonicalPlan() {
  static const BinningPlan plan = BuildBinningPlan(kAnalysisLimitHz);
  return plan;
}

void CalibrationSpec::Validate() const {
  Require(std::isfinite(full_scale_spl) && std::isfinite(floor_spl),
          "calibration values must be finite");
  Require(full_scale_spl > floor_spl, "full_scale_spl must exceed floor_spl");
  Require(floor_spl <= 0.0, "floor_spl must be <= 0 dB SPL");
}

// A full-scale sinusoid has mean square 1/2.
double CalibrationSpec::LevelOfMeanSquare(double mean_square) const {
  return full_scale_spl + 10.0 * std::log10(mean_square / 0.5);
}

double CalibrationSpec::MeanSquareOfLevel(double spl) const {
  return 0.5 * std::pow(10.0, (spl - full_scale_spl) / 10.0);
}

SpectrumFrame SpectrumFrame::Filled(float level) {
  SpectrumFrame f;
  f.levels.fill(level);
  return f;
}

SpectrumFrame PureToneFrame(double hz, double level_spl, const CalibrationSpec& cal,
                            const BinningPlan& plan) {
  const int band = plan.BandOf(hz);
  Require(band >= 0, "tone frequency " + std::to_string(hz) + " Hz outside the band plan");
  SpectrumFrame f = SpectrumFrame::Filled(static_cast<float>(cal.floor_spl));
  f.levels[band] = static_cast<float>(std::clamp(level_spl, cal.floor_spl, kMaxBandSpl));
  return f;
}

void ValidateSpectrum(const SpectrumFrame& frame, const CalibrationSpec& cal) {
  for (int b = 0; b < kNumBands; ++b) {
    const float v = frame.levels[b];
    if (!std::isfinite(v) || v < static_cast<float>(cal.floor_spl) ||
        v > static_cast<float>(kMaxBandSpl)) {
      Fail(ErrorCode::kInvalidArgument,
           "band " + std::to_string(b) + " level " + std::to_string(v) + " out of range");
    }
  }
}

size_t FrameCount(size_t num_samples, int hop, int dft_size) {
  if (num_samples == 0) return 0;
  if (num_samples <= static_cast<size_t>(dft_size)) return 1;
  const size_t excess = num_samples - static_cast<size_t>(dft_size);
  return (excess + hop - 1) / hop + 1;
}

std::vector<AudioFrame> FrameAudio(std::span<const float> signal, double sample_rate, int hop,
                                   int dft_size) {
  Require(hop > 0, "hop must be positive");
  Require(IsPowerOfTwo(dft_size), "dft_size must be a power of two");
  Require(sample_rate >= 2.0 * kAnalysisLimitHz, "sample rate must be at least 16 kHz");
  const size_t count = FrameCount(signal.size(), hop, dft_size);
  std::vector<AudioFrame> frames(count);
  for (size_t i = 0; i < count; ++i) {
    const size_t start = i * static_cast<size_t>(hop);
    auto& f = frames[i];
    f.sample_rate = sample_rate;
    f.samples.assign(dft_size, 0.0f);
    // With hop > dft_size the last frame may start past the end: all padding.
    const size_t n = start < signal.size() ? std::min<size_t>(dft_size, signal.size() - start) : 0;
    std::copy_n(signal.begin() + start, n, f.samples.begin());
  }
  return frames;
}

double RmsLevel(std::span<const float> signal, const CalibrationSpec& cal) {
  Require(!signal.empty(), "empty signal has no level");
  double sum = 0.0;
  for (float x : signal) sum += static_cast<double>(x) * x;
  return cal.LevelOfMeanSquare(sum / signal.size());
}

double RmsGain(std::span<const float> signal, double target_spl, const CalibrationSpec& cal) {
  cal.Validate();
  double sum = 0.0;
  for (float x : signal) sum += static_cast<double>(x) * x;
  if (signal.empty() || !(sum > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "cannot calibrate a signal with zero RMS");
  }
  const double current = cal.LevelOfMeanSquare(sum / signal.size());
  return std::pow(10.0, (target_spl - current) / 20.0);
}

std::vector<float> CalibrateRms(std::span<const float> signal, double target_spl,
                                const CalibrationSpec& cal) {
  const double gain = RmsGain(signal, target_spl, cal);
  std::vector<float> out(signal.size());
  std::transform(signal.begin(), signal.end(), out.begin(),
                 [gain](float x) { return static_cast<float>(x * gain); });
  return out;
}

struct SpectrumAnalyzer::Fft {
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  explicit Fft(int n) {
    std::lock_guard lock(PlannerMutex());
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard lock(PlannerMutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
};

SpectrumAnalyzer::SpectrumAnalyzer(double sample_rate, int dft_size, CalibrationSpec cal,
                                   const BinningPlan& plan)
    : sample_rate_(sample_rate), dft_size_(dft_size), cal_(cal) {
  cal_.Validate();
  Require(IsPowerOfTwo(dft_size), "dft_size must be a power of two");
  Require(sample_rate / 2.0 >= kAnalysisLimitHz,
          "sample rate " + std::to_string(sample_rate) + " Hz cannot reach the 8 kHz analysis limit");
  window_.resize(dft_size);
  for (int n = 0; n < dft_size; ++n) {
    window_[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / dft_size);
    window_energy_ += window_[n] * window_[n];
  }
  const int bins = dft_size / 2 + 1;
  bin_band_.resize(bins);
  for (int k = 0; k < bins; ++k) bin_band_[k] = plan.BandOf(k * sample_rate / dft_size);
  fft_ = std::make_unique<Fft>(dft_size);
}

SpectrumAnalyzer::~SpectrumAnalyzer() = default;

std::vector<double> SpectrumAnalyzer::BinPowers(std::span<const float> frame) {
  Require(frame.size() <= static_cast<size_t>(dft_size_), "frame longer than dft_size");
  for (int n = 0; n < dft_size_; ++n) {
    fft_->in[n] = n < static_cast<int>(frame.size()) ? frame[n] * window_[n] : 0.0;
  }
  fftw_execute(fft_->plan);
  const int bins = dft_size_ / 2 + 1;
  std::vector<double> power(bins);
  // Sum over all bins equals the window-weighted mean square of the frame.
  const double norm = 1.0 / (static_cast<double>(dft_size_) * window_energy_);
  for (int k = 0; k < bins; ++k) {
    const double re = fft_->out[k][0];
    const double im = fft_->out[k][1];
    const double weight = (k == 0 || k == bins - 1) ? 1.0 : 2.0;
    power[k] = weight * (re * re + im * im) * norm;
  }
  return power;
}

std::array<double, kNumBands> SpectrumAnalyzer::BandPowers(std::span<const float> frame) {
  const auto bins = BinPowers(frame);
  std::array<double, kNumBands> bands{};
  for (size_t k = 0; k < bins.size(); ++k) {
    if (bin_band_[k] >= 0) bands[bin_band_[k]] += bins[k];
  }
  return bands;
}

SpectrumFrame SpectrumAnalyzer::Reduce(std::span<const float> frame) {
  const auto powers = BandPowers(frame);
  SpectrumFrame out;
  for (int b = 0; b < kNumBands; ++b) {
    double level = powers[b] > 0.0 ? cal_.LevelOfMeanSquare(powers[b]) : cal_.floor_spl;
    level = std::clamp(level, cal_.floor_spl, kMaxBandSpl);
    out.levels[b] = static_cast<float>(level);
  }
  return out;
}

SpectrumFrame ReduceSpectrum(const AudioFrame& frame, const CalibrationSpec& cal,
                             const BinningPlan& plan) {
  SpectrumAnalyzer analyzer(frame.sample_rate, static_cast<int>(frame.samples.size()), cal, plan);
  return analyzer.Reduce(frame.samples);
}

}  // namespace loudnet
