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

#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "error.hpp"
#include "spectrum_io.hpp"
#include "wav.hpp"

namespace loudnet {

namespace {

constexpr size_t kChunk = 1024;
constexpr const char* kCategoryNames[kNumCategories] = {"speech",   "tone",  "noise",
                                                        "music",    "external", "notched"};

double PowerSumDb(double a_db, double b_db) {
  return 10.0 * std::log10(std::pow(10.0, a_db / 10.0) + std::pow(10.0, b_db / 10.0));
}

// Integral of (f / ref)^beta over [a, b].
double PowerLawIntegral(double a, double b, double beta, double ref) {
  if (b <= a) return 0.0;
  const double x0 = a / ref;
  const double x1 = b / ref;
  if (std::abs(beta + 1.0) < 1e-9) return ref * std::log(x1 / x0);
  return ref * (std::pow(x1, beta + 1.0) - std::pow(x0, beta + 1.0)) / (beta + 1.0);
}

template <typename MakeRecord>
std::vector<DatasetRecord> GenerateChunked(size_t count, uint64_t seed, int workers,
                                           MakeRecord make) {
  std::vector<DatasetRecord> out(count);
  const size_t n_chunks = (count + kChunk - 1) / kChunk;
  ParallelChunks(n_chunks, workers, [&](size_t chunk) {
    Rng rng(DeriveSeed(seed, chunk));
    const size_t end = std::min(count, (chunk + 1) * kChunk);
    for (size_t i = chunk * kChunk; i < end; ++i) out[i] = make(rng);
  });
  return out;
}

}  // namespace

const char* CategoryName(Category c) {
  const auto i = static_cast<size_t>(c);
  return i < kNumCategories ? kCategoryNames[i] : "unknown";
}

std::optional<Category> ParseCategory(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    if (name == kCategoryNames[i]) return static_cast<Category>(i);
  }
  return std::nullopt;
}

CategoryCounts CountCategories(std::span<const DatasetRecord> records) {
  CategoryCounts counts{};
  for (const auto& r : records) ++counts[static_cast<size_t>(r.category)];
  return counts;
}

void StampOracle(Dataset& dataset, const Oracle& oracle) {
  dataset.header["oracle_version"] = Oracle::kVersion;
  dataset.header["calibration_hash"] = oracle.calibration_hash();
}

void SaveDataset(const std::string& path, const Dataset& dataset) {
  nlohmann::ordered_json header = dataset.header;
  header["format"] = "LDS1";
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  const auto c = CountCategories(dataset.records);
  for (int i = 0; i < kNumCategories; ++i) counts[kCategoryNames[i]] = c[i];
  header["category_counts"] = counts;
  const std::string text = header.dump();

  ByteWriter w;
  w.PutRaw("LDS1");
  w.Put<uint32_t>(static_cast<uint32_t>(text.size()));
  w.PutRaw(text);
  w.Put<uint64_t>(dataset.records.size());
  w.bytes().reserve(w.bytes().size() + dataset.records.size() * (kNumBands * 4 + 5));
  for (const auto& r : dataset.records) {
    w.PutSpan<float>(r.spectrum.levels);
    w.Put<float>(r.phon);
    w.Put<uint8_t>(static_cast<uint8_t>(r.category));
  }
  WriteFileBytes(path, w.bytes());
}

Dataset LoadDataset(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  ByteReader r(bytes, path);
  if (r.GetRaw(4) != "LDS1") Fail(ErrorCode::kFormat, path + ": bad magic, expected LDS1");
  const auto header_len = r.Get<uint32_t>();
  Dataset ds;
  try {
    ds.header = nlohmann::ordered_json::parse(r.GetRaw(header_len));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormat, path + ": malformed header: " + e.what());
  }
  const auto count = r.Get<uint64_t>();
  constexpr size_t kRecordBytes = kNumBands * 4 + 4 + 1;
  if (r.remaining() != count * kRecordBytes) {
    Fail(ErrorCode::kFormat, path + ": record data size does not match count");
  }
  ds.records.resize(count);
  for (auto& rec : ds.records) {
    r.GetSpan<float>(rec.spectrum.levels);
    rec.phon = r.Get<float>();
    const auto cat = r.Get<uint8_t>();
    if (cat >= kNumCategories) Fail(ErrorCode::kFormat, path + ": unknown category byte");
    rec.category = static_cast<Category>(cat);
  }
  return ds;
}

void SplitByCategory(std::span<const DatasetRecord> records, uint32_t held_out_mask,
                     std::vector<DatasetRecord>& kept, std::vector<DatasetRecord>& held_out) {
  kept.clear();
  held_out.clear();
  for (const auto& r : records) {
    (held_out_mask & CategoryBit(r.category) ? held_out : kept).push_back(r);
  }
}

void ToneSpec::Validate(const CalibrationSpec& cal) const {
  Require(frequency_hz >= 20.0 && frequency_hz <= 8000.0, "tone frequency outside [20, 8000] Hz");
  Require(level_spl >= -15.0 && level_spl <= 110.0, "tone level outside [-15, 110] dB SPL");
  if (background.empty()) return;
  Require(background.size() == kNumBands, "tone background must have 61 bands");
  for (float b : background) {
    Require(b >= cal.floor_spl && b <= level_spl - 10.0,
            "tone background must stay at least 10 dB below the tone");
  }
}

void NoiseSpec::Validate() const {
  Require(bandwidth_hz > 0.0, "noise bandwidth must be positive");
  Require(notch_width_hz >= 0.0 && notch_width_hz < bandwidth_hz,
          "notch width must be non-negative and below the bandwidth");
  Require(center_hz > 0.0, "noise centre must be positive");
  Require(notch_position >= 0.0 && notch_position <= 1.0, "notch position must lie in [0, 1]");
}

double NoiseSpec::lower_hz() const {
  return 0.5 * (-bandwidth_hz + std::sqrt(bandwidth_hz * bandwidth_hz + 4.0 * center_hz * center_hz));
}

double NoiseSpec::upper_hz() const { return lower_hz() + bandwidth_hz; }

SpectrumFrame ToneSpectrum(const ToneSpec& spec, const CalibrationSpec& cal) {
  spec.Validate(cal);
  if (spec.background.empty()) return PureToneFrame(spec.frequency_hz, spec.level_spl, cal);
  SpectrumFrame f;
  std::copy(spec.background.begin(), spec.background.end(), f.levels.begin());
  const int band = CanonicalPlan().BandOf(spec.frequency_hz);
  const double combined = PowerSumDb(spec.level_spl, f.levels[band]);
  f.levels[band] = static_cast<float>(std::clamp(combined, cal.floor_spl, kMaxBandSpl));
  return f;
}

SpectrumFrame NoiseSpectrum(const NoiseSpec& spec, const CalibrationSpec& cal) {
  spec.Validate();
  const auto& plan = CanonicalPlan();
  // PSD slope in dB/octave becomes a power-law exponent in frequency.
  const double beta = spec.gradient_db_per_octave / (10.0 * std::log10(2.0));
  const double lo = std::max(spec.lower_hz(), 20.0);
  const double hi = std::min(spec.upper_hz(), plan.edges.back());
  Require(hi > lo, "noise passband lies outside the analysis range");
  const double notch_lo = lo + spec.notch_position * (hi - lo - spec.notch_width_hz);
  const double notch_hi = notch_lo + spec.notch_width_hz;

  std::array<double, kNumBands> power{};
  double total = 0.0;
  for (int b = 0; b < kNumBands; ++b) {
    const double a = std::max(plan.lower(b), lo);
    const double z = std::min(plan.upper(b), hi);
    if (z <= a) continue;
    double p = PowerLawIntegral(a, z, beta, spec.center_hz);
    if (spec.notch_width_hz > 0.0) {
      p -= PowerLawIntegral(std::max(a, notch_lo), std::min(z, notch_hi), beta, spec.center_hz);
    }
    power[b] = std::max(p, 0.0);
    total += power[b];
  }
  Require(total > 0.0, "noise spectrum has no power in the analysis range");
  const double scale = std::pow(10.0, spec.level_spl / 10.0) / total;
  SpectrumFrame f;
  for (int b = 0; b < kNumBands; ++b) {
    const double level = power[b] > 0.0 ? 10.0 * std::log10(power[b] * scale) : cal.floor_spl;
    f.levels[b] = static_cast<float>(std::clamp(level, cal.floor_spl, kMaxBandSpl));
  }
  return f;
}

ToneSpec SampleToneSpec(Rng& rng, const CalibrationSpec& cal, const SynthOptions& opts) {
  ToneSpec spec;
  spec.frequency_hz = rng.LogUniform(50.0, 8000.0);
  spec.level_spl = rng.Uniform(-15.0, 110.0);
  const bool silent = rng.Uniform() < opts.silent_background_fraction;
  const double ceiling = spec.level_spl - 10.0;
  if (!silent && ceiling > cal.floor_spl) {
    spec.background.resize(kNumBands);
    for (auto& b : spec.background) {
      b = static_cast<float>(rng.Uniform(cal.floor_spl, ceiling));
      // float rounding must not lift a band over the -10 dB limit
      while (b > ceiling) b = std::nextafter(b, -std::numeric_limits<float>::infinity());
    }
  }
  return spec;
}

NoiseSpec SampleNoiseSpec(Rng& rng, bool notched) {
  const auto& plan = CanonicalPlan();
  NoiseSpec spec;
  spec.level_spl = rng.Uniform(0.0, 100.0);
  spec.center_hz = rng.LogUniform(50.0, 8000.0);
  const int band = plan.BandOf(spec.center_hz);
  const double min_bw = plan.upper(band) - plan.lower(band);
  spec.bandwidth_hz = rng.LogUniform(min_bw, plan.edges.back());
  spec.gradient_db_per_octave = rng.Uniform(-12.0, 12.0);
  if (notched) {
    // Widths relative to the passband that survives clipping to the plan.
    const double lo = std::max(spec.lower_hz(), 20.0);
    const double hi = std::min(spec.upper_hz(), plan.edges.back());
    spec.notch_width_hz = rng.Uniform(0.1, 0.5) * (hi - lo);
    spec.notch_position = rng.Uniform();
  }
  return spec;
}

std::vector<DatasetRecord> GenerateToneRecords(size_t count, uint64_t seed, const Oracle& oracle,
                                               const SynthOptions& opts) {
  Require(count > 0, "tone count must be positive");
  const auto& cal = oracle.params().cal;
  return GenerateChunked(count, seed, opts.workers, [&](Rng& rng) {
    DatasetRecord r;
    r.spectrum = ToneSpectrum(SampleToneSpec(rng, cal, opts), cal);
    r.phon = static_cast<float>(oracle.Loudness(r.spectrum).phon);
    r.category = Category::kTone;
    return r;
  });
}

std::vector<DatasetRecord> GenerateNoiseRecords(size_t count, uint64_t seed, const Oracle& oracle,
                                                const SynthOptions& opts) {
  Require(count > 0, "noise count must be positive");
  const auto& cal = oracle.params().cal;
  return GenerateChunked(count, seed, opts.workers, [&](Rng& rng) {
    const bool notched = rng.Uniform() < opts.notched_fraction;
    DatasetRecord r;
    r.spectrum = NoiseSpectrum(SampleNoiseSpec(rng, notched), cal);
    r.phon = static_cast<float>(oracle.Loudness(r.spectrum).phon);
    r.category = notched ? Category::kNotched : Category::kNoise;
    return r;
  });
}

std::vector<float> LabelSpectra(std::span<const SpectrumFrame> spectra, const Oracle& oracle,
                                int workers) {
  std::vector<float> out(spectra.size());
  const size_t n_chunks = (spectra.size() + kChunk - 1) / kChunk;
  ParallelChunks(n_chunks, workers, [&](size_t chunk) {
    const size_t end = std::min(spectra.size(), (chunk + 1) * kChunk);
    for (size_t i = chunk * kChunk; i < end; ++i) {
      out[i] = static_cast<float>(oracle.Loudness(spectra[i]).phon);
    }
  });
  return out;
}

std::vector<DatasetRecord> IngestWav(std::span<const std::string> paths, const Oracle& oracle,
                                     const IngestOptions& opts, IngestReport* report) {
  IngestReport local;
  IngestReport& rep = report ? *report : local;
  std::vector<SpectrumFrame> spectra;
  std::set<std::string> seen;
  for (const auto& path : paths) {
    if (opts.max_records && spectra.size() >= opts.max_records) break;
    if (!seen.insert(path).second) {
      rep.failures.emplace_back(path, "duplicate path, skipped");
      continue;
    }
    try {
      const WavData wav = ReadWav(path);
      if (wav.samples.empty()) {
        rep.failures.emplace_back(path, "no samples");
        continue;
      }
      const auto scaled = CalibrateRms(wav.samples, opts.target_spl, opts.cal);
      SpectrumAnalyzer analyzer(wav.sample_rate, opts.dft_size, opts.cal);
      const auto frames = FrameAudio(scaled, wav.sample_rate, opts.hop, opts.dft_size);
      for (const auto& f : frames) {
        if (opts.max_records && spectra.size() >= opts.max_records) break;
        spectra.push_back(analyzer.Reduce(f.samples));
      }
      ++rep.files_ok;
    } catch (const Error& e) {
      rep.failures.emplace_back(path, e.what());
    }
  }
  const auto labels = LabelSpectra(spectra, oracle);
  std::vector<DatasetRecord> out(spectra.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = {spectra[i], labels[i], opts.category};
  }
  return out;
}

std::vector<DatasetRecord> ImportLabels(const std::string& spectra_path,
                                        const std::string& labels_path) {
  const auto spectra = ReadSpectrumFile(spectra_path);
  const auto labels = ReadLabelFile(labels_path);
  if (spectra.size() != labels.size()) {
    Fail(ErrorCode::kInvalidArgument, "spectra/label count mismatch: " +
                                          std::to_string(spectra.size()) + " vs " +
                                          std::to_string(labels.size()));
  }
  const CalibrationSpec cal;
  std::vector<DatasetRecord> out(spectra.size());
  for (size_t i = 0; i < out.size(); ++i) {
    ValidateSpectrum(spectra[i], cal);
    Require(std::isfinite(labels[i]) && labels[i] >= 0.0f && labels[i] <= kMaxPhon,
            "imported label " + std::to_string(i) + " outside [0, 130] phon");
    out[i] = {spectra[i], labels[i], Category::kExternal};
  }
  return out;
}

}  // namespace loudnet
