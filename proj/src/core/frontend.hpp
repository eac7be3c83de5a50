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

#ifndef LOUDNET_CORE_FRONTEND_HPP_
#define LOUDNET_CORE_FRONTEND_HPP_

// Reduced-spectrum frontend: framing, Hann-windowed DFT, and aggregation of
// DFT bin powers into 61 bands (constant-width below 200 Hz, ninth-octave
// above), expressed in dB SPL.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace loudnet {

inline constexpr int kNumBands = 61;
inline constexpr double kLinearLimitHz = 200.0;
inline constexpr double kAnalysisLimitHz = 8000.0;
inline constexpr double kMaxBandSpl = 140.0;

inline constexpr int kDefaultHop = 560;
inline constexpr int kDefaultDftSize = 1024;
inline constexpr double kDefaultSampleRate = 16000.0;

struct BinningPlan {
  int n_linear = 0;
  int n_log = 0;
  // kNumBands + 1 strictly increasing edges; edges[0] == 0.
  std::vector<double> edges;

  double lower(int band) const { return edges[band]; }
  double upper(int band) const { return edges[band + 1]; }
  // Arithmetic centre for the linear bands, geometric centre for log bands.
  double center(int band) const;
  // Band whose [lower, upper) interval holds hz, or -1 outside the plan.
  int BandOf(double hz) const;
};

// Throws for limits that cannot produce 61 bands of positive width.
BinningPlan BuildBinningPlan(double limit_hz = kAnalysisLimitHz);
// The 8 kHz plan every SpectrumFrame refers to.
const BinningPlan& CanonicalPlan();

struct CalibrationSpec {
  double full_scale_spl = 100.0;  // dB SPL of a full-scale sinusoid
  double floor_spl = -10.0;       // clamp for empty bands

  void Validate() const;
  // dB SPL of a signal with the given mean square (full-scale units).
  double LevelOfMeanSquare(double mean_square) const;
  double MeanSquareOfLevel(double spl) const;
};

struct SpectrumFrame {
  std::array<float, kNumBands> levels{};

  static SpectrumFrame Filled(float level);
  bool operator==(const SpectrumFrame&) const = default;
};

// Band-domain pure tone: the band holding hz carries level_spl (clamped to
// the floor), every other band sits at the floor.
SpectrumFrame PureToneFrame(double hz, double level_spl, const CalibrationSpec& cal = {},
                            const BinningPlan& plan = CanonicalPlan());

// Checks band count, finiteness and the [floor, 140] range.
void ValidateSpectrum(const SpectrumFrame& frame, const CalibrationSpec& cal);

struct AudioFrame {
  std::vector<float> samples;
  double sample_rate = kDefaultSampleRate;
};

// Frames start at multiples of hop; the minimum number of frames that covers
// every sample is produced, the last one zero-padded.
std::vector<AudioFrame> FrameAudio(std::span<const float> signal, double sample_rate,
                                   int hop = kDefaultHop, int dft_size = kDefaultDftSize);
size_t FrameCount(size_t num_samples, int hop, int dft_size);

// Scales a signal by one gain so its RMS level equals target_spl.
std::vector<float> CalibrateRms(std::span<const float> signal, double target_spl,
                                const CalibrationSpec& cal);
double RmsGain(std::span<const float> signal, double target_spl, const CalibrationSpec& cal);
double RmsLevel(std::span<const float> signal, const CalibrationSpec& cal);

// Reusable analyzer holding the DFT plan, window and bin-to-band map for one
// (sample rate, dft size). Not thread-safe; create one per thread.
class SpectrumAnalyzer {
 public:
  SpectrumAnalyzer(double sample_rate, int dft_size, CalibrationSpec cal = {},
                   const BinningPlan& plan = CanonicalPlan());
  ~SpectrumAnalyzer();
  SpectrumAnalyzer(const SpectrumAnalyzer&) = delete;
  SpectrumAnalyzer& operator=(const SpectrumAnalyzer&) = delete;

  // frame.size() must be <= dft_size; shorter frames are zero-padded.
  SpectrumFrame Reduce(std::span<const float> frame);
  // Linear band powers (mean square, full-scale units) before dB conversion.
  std::array<double, kNumBands> BandPowers(std::span<const float> frame);
  // One-sided power per DFT bin with the same normalisation as BandPowers.
  std::vector<double> BinPowers(std::span<const float> frame);

  double sample_rate() const { return sample_rate_; }
  int dft_size() const { return dft_size_; }
  const CalibrationSpec& calibration() const { return cal_; }
  // Band index per DFT bin, -1 for bins at or above the last edge.
  const std::vector<int>& bin_bands() const { return bin_band_; }

 private:
  struct Fft;
  double sample_rate_;
  int dft_size_;
  CalibrationSpec cal_;
  std::vector<double> window_;
  double window_energy_ = 0.0;
  std::vector<int> bin_band_;
  std::unique_ptr<Fft> fft_;
};

SpectrumFrame ReduceSpectrum(const AudioFrame& frame, const CalibrationSpec& cal = {},
                             const BinningPlan& plan = CanonicalPlan());

}  // namespace loudnet

#endif  // LOUDNET_CORE_FRONTEND_HPP_
