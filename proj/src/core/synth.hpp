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

#ifndef LOUDNET_CORE_SYNTH_HPP_
#define LOUDNET_CORE_SYNTH_HPP_

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "frontend.hpp"
#include "oracle.hpp"
#include "util.hpp"

namespace loudnet {

enum class Category : uint8_t {
  kSpeech = 0,
  kTone = 1,
  kNoise = 2,
  kMusic = 3,
  kExternal = 4,
  kNotched = 5,
};
inline constexpr int kNumCategories = 6;

const char* CategoryName(Category c);
std::optional<Category> ParseCategory(std::string_view name);
inline uint32_t CategoryBit(Category c) { return 1u << static_cast<uint32_t>(c); }

struct DatasetRecord {
  SpectrumFrame spectrum;
  float phon = 0.0f;
  Category category = Category::kTone;

  bool operator==(const DatasetRecord&) const = default;
};

using CategoryCounts = std::array<uint64_t, kNumCategories>;
CategoryCounts CountCategories(std::span<const DatasetRecord> records);

// "LDS1" file: magic, u32 header length, JSON header, u64 record count, then
// packed records of 61 float32 levels, float32 phon, u8 category.
struct Dataset {
  nlohmann::ordered_json header = nlohmann::ordered_json::object();
  std::vector<DatasetRecord> records;
};

void SaveDataset(const std::string& path, const Dataset& dataset);
Dataset LoadDataset(const std::string& path);
// Header fields describing the labelling oracle.
void StampOracle(Dataset& dataset, const Oracle& oracle);

// Records whose category bit is set in held_out_mask go to `held_out`.
void SplitByCategory(std::span<const DatasetRecord> records, uint32_t held_out_mask,
                     std::vector<DatasetRecord>& kept, std::vector<DatasetRecord>& held_out);

struct ToneSpec {
  double frequency_hz = 1000.0;
  double level_spl = 60.0;
  // Per-band background levels; empty means a silent background.
  std::vector<float> background;

  void Validate(const CalibrationSpec& cal) const;
};

struct NoiseSpec {
  double center_hz = 1000.0;  // geometric centre of the passband
  double bandwidth_hz = 1000.0;
  double notch_width_hz = 0.0;
  // Position of the notch inside the passband: 0 at the lower edge, 1 at the
  // upper edge, 0.5 centred.
  double notch_position = 0.5;
  double level_spl = 60.0;
  double gradient_db_per_octave = 0.0;  // slope of the power spectral density

  void Validate() const;
  double lower_hz() const;
  double upper_hz() const;
};

SpectrumFrame ToneSpectrum(const ToneSpec& spec, const CalibrationSpec& cal = {});
SpectrumFrame NoiseSpectrum(const NoiseSpec& spec, const CalibrationSpec& cal = {});

struct SynthOptions {
  // Share of tone records drawn without any background noise.
  double silent_background_fraction = 0.2;
  // Share of noise records that carry a spectral notch (category kNotched).
  double notched_fraction = 0.5;
  int workers = 0;  // 0 = hardware concurrency
};

ToneSpec SampleToneSpec(Rng& rng, const CalibrationSpec& cal, const SynthOptions& opts);
NoiseSpec SampleNoiseSpec(Rng& rng, bool notched);

std::vector<DatasetRecord> GenerateToneRecords(size_t count, uint64_t seed, const Oracle& oracle,
                                               const SynthOptions& opts = {});
std::vector<DatasetRecord> GenerateNoiseRecords(size_t count, uint64_t seed, const Oracle& oracle,
                                                const SynthOptions& opts = {});

struct IngestOptions {
  double target_spl = 60.0;
  int hop = kDefaultHop;
  int dft_size = kDefaultDftSize;
  CalibrationSpec cal;
  Category category = Category::kSpeech;
  size_t max_records = 0;  // 0 = no limit
};

struct IngestReport {
  size_t files_ok = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (path, reason)
};

// Per-file failures are collected in `report` and the remaining files are
// still processed.
std::vector<DatasetRecord> IngestWav(std::span<const std::string> paths, const Oracle& oracle,
                                     const IngestOptions& opts, IngestReport* report = nullptr);

// Pairs an SPF1 spectra file with an LBL1 label file; records are tagged
// kExternal and only range-checked.
std::vector<DatasetRecord> ImportLabels(const std::string& spectra_path,
                                        const std::string& labels_path);

// Labels spectra with the oracle, fanning out across worker threads in fixed
// chunks so the result does not depend on the worker count.
std::vector<float> LabelSpectra(std::span<const SpectrumFrame> spectra, const Oracle& oracle,
                                int workers = 0);

}  // namespace loudnet

#endif  // LOUDNET_CORE_SYNTH_HPP_
