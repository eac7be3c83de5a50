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

#include "loudnet/loudnet.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "error.hpp"
#include "eval.hpp"
#include "frontend.hpp"
#include "mlp.hpp"
#include "oracle.hpp"
#include "spectrum_io.hpp"
#include "stream.hpp"
#include "synth.hpp"
#include "train.hpp"
#include "util.hpp"
#include "wav.hpp"

using namespace loudnet;

struct ln_oracle {
  Oracle oracle;
};
struct ln_dataset {
  Dataset ds;
};
struct ln_model {
  MlpModel model;
};
struct ln_trainer {
  std::unique_ptr<Trainer> trainer;
};
struct ln_stream {
  std::unique_ptr<StreamProcessor> proc;
};
struct ln_audio_reader {
  std::unique_ptr<WavReader> wav;
  std::unique_ptr<std::ifstream> raw_file;
  std::unique_ptr<RawPcmReader> raw;
  double sample_rate = 0.0;
};

namespace {

thread_local std::string g_last_error;

ln_status StatusOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return LN_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo: return LN_ERR_IO;
    case ErrorCode::kFormat: return LN_ERR_FORMAT;
    case ErrorCode::kNumeric: return LN_ERR_NUMERIC;
    case ErrorCode::kState: return LN_ERR_STATE;
  }
  return LN_ERR_INTERNAL;
}

template <typename F>
ln_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return StatusOf(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return LN_ERR_FORMAT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LN_ERR_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) Fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

CalibrationSpec ToCal(ln_calibration c) {
  CalibrationSpec cal;
  cal.full_scale_spl = c.full_scale_spl;
  cal.floor_spl = c.floor_spl;
  cal.Validate();
  return cal;
}

nlohmann::ordered_json ParseValue(const char* json_value) {
  NotNull(json_value, "json value");
  try {
    return nlohmann::ordered_json::parse(json_value);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("invalid JSON value: ") + e.what());
  }
}

void AddSource(Dataset& ds, nlohmann::ordered_json source) {
  if (!ds.header.contains("sources")) ds.header["sources"] = nlohmann::ordered_json::array();
  ds.header["sources"].push_back(std::move(source));
}

void Stamp(Dataset& ds, const Oracle& oracle) {
  if (ds.header.contains("calibration_hash") &&
      ds.header["calibration_hash"] != oracle.calibration_hash()) {
    Fail(ErrorCode::kState, "dataset already holds labels from a different oracle calibration");
  }
  StampOracle(ds, oracle);
}

nlohmann::ordered_json StatsOf(const ErrorStats& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["rms_phon"] = s.rms;
  j["mean_signed_phon"] = s.mean_signed;
  j["max_abs_phon"] = s.max_abs;
  return j;
}

}  // namespace

extern "C" {

const char* ln_version(void) { return "1.0.0"; }
const char* ln_last_error(void) { return g_last_error.c_str(); }
void ln_string_free(char* s) { std::free(s); }

ln_status ln_file_hash(const char* path, char** hex) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(hex, "output");
    *hex = CopyString(HexU64(Fnv1a64(ReadFileBytes(path))));
  });
}

ln_calibration ln_calibration_default(void) {
  const CalibrationSpec cal;
  return {cal.full_scale_spl, cal.floor_spl};
}

ln_status ln_band_edges(double edges[LN_NUM_BANDS + 1]) {
  return Guard([&] {
    NotNull(edges, "edges");
    const auto& plan = CanonicalPlan();
    std::copy(plan.edges.begin(), plan.edges.end(), edges);
  });
}

ln_status ln_frame_count(size_t num_samples, int hop, int dft_size, size_t* count) {
  return Guard([&] {
    NotNull(count, "count");
    Require(hop > 0, "hop must be positive");
    Require(dft_size > 0 && (dft_size & (dft_size - 1)) == 0, "dft size must be a power of two");
    *count = FrameCount(num_samples, hop, dft_size);
  });
}

ln_status ln_category_parse(const char* name, int* category) {
  return Guard([&] {
    NotNull(name, "name");
    NotNull(category, "category");
    const auto c = ParseCategory(name);
    if (!c) Fail(ErrorCode::kInvalidArgument, std::string("unknown category '") + name + "'");
    *category = static_cast<int>(*c);
  });
}

const char* ln_category_name(int category) {
  if (category < 0 || category >= kNumCategories) return "unknown";
  return CategoryName(static_cast<Category>(category));
}

// ---- oracle ----

ln_status ln_oracle_calibrate(const char* ear_json_path, ln_calibration cal, ln_oracle** out) {
  return Guard([&] {
    NotNull(out, "output");
    EarTransfer ear = EarTransfer::Default();
    if (ear_json_path != nullptr) {
      ear = EarTransfer::FromJson(nlohmann::json::parse(ReadFileText(ear_json_path)));
    }
    OracleParams params;
    params.cal = ToCal(cal);
    *out = new ln_oracle{Oracle::Calibrate(ear, params)};
  });
}

ln_status ln_oracle_load(const char* cache_path, ln_oracle** out) {
  return Guard([&] {
    NotNull(cache_path, "path");
    NotNull(out, "output");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(ReadFileText(cache_path));
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kFormat, std::string(cache_path) + ": " + e.what());
    }
    *out = new ln_oracle{Oracle::FromCache(j)};
  });
}

ln_status ln_oracle_save(const ln_oracle* oracle, const char* cache_path) {
  return Guard([&] {
    NotNull(oracle, "oracle");
    NotNull(cache_path, "path");
    WriteFileText(cache_path, oracle->oracle.ToCache().dump(2) + "\n");
  });
}

ln_status ln_oracle_loudness(const ln_oracle* oracle, const float* spectra, size_t n, float* phon,
                             float* sones) {
  return Guard([&] {
    NotNull(oracle, "oracle");
    if (n == 0) return;
    NotNull(spectra, "spectra");
    NotNull(phon, "phon");
    const auto cal = oracle->oracle.params().cal;
    for (size_t i = 0; i < n; ++i) {
      SpectrumFrame f;
      std::copy_n(spectra + i * kNumBands, kNumBands, f.levels.begin());
      ValidateSpectrum(f, cal);
      const auto label = oracle->oracle.Loudness(f);
      phon[i] = static_cast<float>(label.phon);
      if (sones != nullptr) sones[i] = static_cast<float>(label.sone);
    }
  });
}

ln_status ln_oracle_info_json(const ln_oracle* oracle, char** json) {
  return Guard([&] {
    NotNull(oracle, "oracle");
    NotNull(json, "output");
    nlohmann::ordered_json j;
    j["version"] = Oracle::kVersion;
    j["calibration_hash"] = oracle->oracle.calibration_hash();
    j["loudness_constant"] = oracle->oracle.loudness_constant();
    j["excitation_norm"] = oracle->oracle.excitation_norm();
    j["grid_points"] = oracle->oracle.grid_size();
    *json = CopyString(j.dump(2));
  });
}

void ln_oracle_free(ln_oracle* oracle) { delete oracle; }

ln_status ln_oracle_label_file(const ln_oracle* oracle, const char* spectra_path,
                               const char* labels_path, size_t* count) {
  return Guard([&] {
    NotNull(oracle, "oracle");
    NotNull(spectra_path, "spectra path");
    NotNull(labels_path, "labels path");
    const auto frames = ReadSpectrumFile(spectra_path);
    for (const auto& f : frames) ValidateSpectrum(f, oracle->oracle.params().cal);
    WriteLabelFile(labels_path, LabelSpectra(frames, oracle->oracle));
    if (count != nullptr) *count = frames.size();
  });
}

// ---- datasets ----

ln_ingest_options ln_ingest_options_default(void) {
  const IngestOptions d;
  return {d.target_spl, d.hop, d.dft_size, static_cast<int>(d.category),
          {d.cal.full_scale_spl, d.cal.floor_spl}, d.max_records};
}

ln_status ln_dataset_create(ln_dataset** out) {
  return Guard([&] {
    NotNull(out, "output");
    *out = new ln_dataset{};
  });
}

ln_status ln_dataset_load(const char* path, ln_dataset** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "output");
    *out = new ln_dataset{LoadDataset(path)};
  });
}

ln_status ln_dataset_save(const ln_dataset* ds, const char* path) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(path, "path");
    SaveDataset(path, ds->ds);
  });
}

void ln_dataset_free(ln_dataset* ds) { delete ds; }

ln_status ln_dataset_gen_tones(ln_dataset* ds, const ln_oracle* oracle, size_t count,
                               uint64_t seed, int workers) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(oracle, "oracle");
    Stamp(ds->ds, oracle->oracle);
    SynthOptions opts;
    opts.workers = workers;
    auto recs = GenerateToneRecords(count, seed, oracle->oracle, opts);
    ds->ds.records.insert(ds->ds.records.end(), recs.begin(), recs.end());
    AddSource(ds->ds, {{"kind", "tones"},
                       {"count", count},
                       {"seed", seed},
                       {"silent_background_fraction", opts.silent_background_fraction}});
  });
}

ln_status ln_dataset_gen_noises(ln_dataset* ds, const ln_oracle* oracle, size_t count,
                                uint64_t seed, double notched_fraction, int workers) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(oracle, "oracle");
    Require(notched_fraction >= 0.0 && notched_fraction <= 1.0,
            "notched fraction must lie in [0, 1]");
    Stamp(ds->ds, oracle->oracle);
    SynthOptions opts;
    opts.workers = workers;
    opts.notched_fraction = notched_fraction;
    auto recs = GenerateNoiseRecords(count, seed, oracle->oracle, opts);
    ds->ds.records.insert(ds->ds.records.end(), recs.begin(), recs.end());
    AddSource(ds->ds, {{"kind", "noises"},
                       {"count", count},
                       {"seed", seed},
                       {"notched_fraction", notched_fraction}});
  });
}

ln_status ln_dataset_ingest_wav(ln_dataset* ds, const ln_oracle* oracle,
                                const char* const* paths, size_t n_paths,
                                const ln_ingest_options* opts, char** report_json) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(oracle, "oracle");
    if (n_paths > 0) NotNull(paths, "paths");
    const ln_ingest_options o = opts != nullptr ? *opts : ln_ingest_options_default();
    IngestOptions io;
    io.target_spl = o.target_spl;
    io.hop = o.hop;
    io.dft_size = o.dft_size;
    io.cal = ToCal(o.cal);
    Require(o.category >= 0 && o.category < kNumCategories, "invalid category");
    io.category = static_cast<Category>(o.category);
    io.max_records = o.max_records;
    std::vector<std::string> list;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (size_t i = 0; i < n_paths; ++i) {
      NotNull(paths[i], "path");
      list.emplace_back(paths[i]);
    }
    Stamp(ds->ds, oracle->oracle);
    IngestReport report;
    auto recs = IngestWav(list, oracle->oracle, io, &report);
    ds->ds.records.insert(ds->ds.records.end(), recs.begin(), recs.end());
    AddSource(ds->ds, {{"kind", "wav"},
                       {"category", CategoryName(io.category)},
                       {"files", list.size()},
                       {"files_ok", report.files_ok},
                       {"records", recs.size()},
                       {"target_spl", io.target_spl},
                       {"hop", io.hop},
                       {"dft_size", io.dft_size}});
    if (report_json != nullptr) {
      nlohmann::ordered_json j;
      j["files_ok"] = report.files_ok;
      j["records"] = recs.size();
      nlohmann::ordered_json fails = nlohmann::ordered_json::array();
      for (const auto& [path, why] : report.failures) fails.push_back({{"path", path}, {"error", why}});
      j["failures"] = fails;
      *report_json = CopyString(j.dump(2));
    }
  });
}

ln_status ln_dataset_import_labels(ln_dataset* ds, const char* spectra_path,
                                   const char* labels_path) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(spectra_path, "spectra path");
    NotNull(labels_path, "labels path");
    auto recs = ImportLabels(spectra_path, labels_path);
    ds->ds.records.insert(ds->ds.records.end(), recs.begin(), recs.end());
    AddSource(ds->ds, {{"kind", "import"}, {"records", recs.size()}});
  });
}

ln_status ln_dataset_append(ln_dataset* dst, const ln_dataset* src) {
  return Guard([&] {
    NotNull(dst, "destination");
    NotNull(src, "source");
    const auto& h = src->ds.header;
    if (h.contains("calibration_hash")) {
      if (dst->ds.header.contains("calibration_hash") &&
          dst->ds.header["calibration_hash"] != h["calibration_hash"]) {
        Fail(ErrorCode::kState, "datasets were labelled by different oracle calibrations");
      }
      dst->ds.header["oracle_version"] = h["oracle_version"];
      dst->ds.header["calibration_hash"] = h["calibration_hash"];
    }
    if (h.contains("sources")) {
      for (const auto& s : h["sources"]) AddSource(dst->ds, s);
    }
    dst->ds.records.insert(dst->ds.records.end(), src->ds.records.begin(), src->ds.records.end());
  });
}

ln_status ln_dataset_split(const ln_dataset* ds, uint32_t held_out_mask, ln_dataset** kept,
                           ln_dataset** held_out) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(kept, "kept");
    NotNull(held_out, "held_out");
    auto a = std::make_unique<ln_dataset>();
    auto b = std::make_unique<ln_dataset>();
    a->ds.header = ds->ds.header;
    b->ds.header = ds->ds.header;
    SplitByCategory(ds->ds.records, held_out_mask, a->ds.records, b->ds.records);
    *kept = a.release();
    *held_out = b.release();
  });
}

ln_status ln_dataset_size(const ln_dataset* ds, size_t* n) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(n, "output");
    *n = ds->ds.records.size();
  });
}

ln_status ln_dataset_counts(const ln_dataset* ds, uint64_t counts[LN_NUM_CATEGORIES]) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(counts, "counts");
    const auto c = CountCategories(ds->ds.records);
    std::copy(c.begin(), c.end(), counts);
  });
}

ln_status ln_dataset_record(const ln_dataset* ds, size_t index, float spectrum[LN_NUM_BANDS],
                            float* phon, int* category) {
  return Guard([&] {
    NotNull(ds, "dataset");
    Require(index < ds->ds.records.size(), "record index out of range");
    const auto& r = ds->ds.records[index];
    if (spectrum != nullptr) std::copy(r.spectrum.levels.begin(), r.spectrum.levels.end(), spectrum);
    if (phon != nullptr) *phon = r.phon;
    if (category != nullptr) *category = static_cast<int>(r.category);
  });
}

ln_status ln_dataset_set_header(ln_dataset* ds, const char* key, const char* json_value) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(key, "key");
    ds->ds.header[key] = ParseValue(json_value);
  });
}

ln_status ln_dataset_header_json(const ln_dataset* ds, char** json) {
  return Guard([&] {
    NotNull(ds, "dataset");
    NotNull(json, "output");
    *json = CopyString(ds->ds.header.dump(2));
  });
}

// ---- models ----

ln_status ln_model_init(uint64_t seed, ln_model** out) {
  return Guard([&] {
    NotNull(out, "output");
    *out = new ln_model{InitModel(seed)};
  });
}

ln_status ln_model_load(const char* path, ln_model** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "output");
    *out = new ln_model{LoadModel(path)};
  });
}

ln_status ln_model_save(const ln_model* model, const char* path) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(path, "path");
    SaveModel(path, model->model);
  });
}

ln_status ln_model_predict(const ln_model* model, const float* x, size_t rows, float* out) {
  return Guard([&] {
    NotNull(model, "model");
    if (rows == 0) return;
    NotNull(x, "input");
    NotNull(out, "output");
    const size_t cols = static_cast<size_t>(model->model.topology.input_dim());
    const auto y = Predict(model->model, std::span(x, rows * cols), rows);
    std::copy(y.begin(), y.end(), out);
  });
}

ln_status ln_model_info_json(const ln_model* model, char** json) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(json, "output");
    nlohmann::ordered_json j;
    j["dims"] = model->model.topology.dims();
    j["parameters"] = model->model.topology.num_params();
    j["input_shift"] = model->model.input_shift;
    j["input_scale"] = model->model.input_scale;
    j["metadata"] = model->model.metadata;
    *json = CopyString(j.dump(2));
  });
}

ln_status ln_model_set_metadata(ln_model* model, const char* key, const char* json_value) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(key, "key");
    model->model.metadata[key] = ParseValue(json_value);
  });
}

void ln_model_free(ln_model* model) { delete model; }

// ---- training ----

ln_train_config ln_train_config_default(void) {
  const TrainConfig c;
  return {c.adam.learning_rate, c.adam.beta1, c.adam.beta2, c.adam.epsilon, c.batch_size,
          c.shuffle_seed};
}

ln_status ln_trainer_create(const ln_model* model, const ln_dataset* data,
                            const ln_train_config* config, const char* state_path,
                            ln_trainer** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(data, "dataset");
    NotNull(out, "output");
    const ln_train_config c = config != nullptr ? *config : ln_train_config_default();
    TrainConfig tc;
    tc.adam.learning_rate = c.learning_rate;
    tc.adam.beta1 = c.beta1;
    tc.adam.beta2 = c.beta2;
    tc.adam.epsilon = c.epsilon;
    tc.batch_size = c.batch_size;
    tc.shuffle_seed = c.shuffle_seed;
    AdamState state;
    if (state_path != nullptr) state = LoadAdamState(state_path, model->model);
    auto t = std::make_unique<ln_trainer>();
    t->trainer = std::make_unique<Trainer>(model->model, MakeTrainingSet(data->ds.records), tc,
                                           std::move(state));
    *out = t.release();
  });
}

ln_status ln_trainer_run(ln_trainer* trainer, int epochs, ln_epoch_callback callback,
                         void* user) {
  return Guard([&] {
    NotNull(trainer, "trainer");
    Trainer::EpochCallback cb;
    if (callback != nullptr) {
      cb = [&](const EpochStats& s) { return callback(s.epoch, s.loss, s.seconds, user) != 0; };
    }
    trainer->trainer->Run(epochs, cb);
  });
}

ln_status ln_trainer_epoch(const ln_trainer* trainer, int* epoch) {
  return Guard([&] {
    NotNull(trainer, "trainer");
    NotNull(epoch, "output");
    *epoch = trainer->trainer->epoch();
  });
}

ln_status ln_trainer_save_checkpoint(const ln_trainer* trainer, const char* dir,
                                     char** model_path) {
  return Guard([&] {
    NotNull(trainer, "trainer");
    NotNull(dir, "dir");
    SaveCheckpoint(dir, *trainer->trainer);
    if (model_path != nullptr) {
      *model_path = CopyString(CheckpointPath(dir, trainer->trainer->epoch()));
    }
  });
}

ln_status ln_trainer_model(const ln_trainer* trainer, ln_model** copy) {
  return Guard([&] {
    NotNull(trainer, "trainer");
    NotNull(copy, "output");
    *copy = new ln_model{trainer->trainer->model()};
  });
}

ln_status ln_trainer_warnings_json(const ln_trainer* trainer, char** json) {
  return Guard([&] {
    NotNull(trainer, "trainer");
    NotNull(json, "output");
    *json = CopyString(nlohmann::json(trainer->trainer->warnings()).dump(2));
  });
}

void ln_trainer_free(ln_trainer* trainer) { delete trainer; }

// ---- evaluation ----

ln_status ln_eval_errors_json(const ln_model* model, const ln_dataset* ds, uint32_t held_out_mask,
                              char** json) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(ds, "dataset");
    NotNull(json, "output");
    const auto& recs = ds->ds.records;
    const auto set = MakeTrainingSet(recs);
    const auto pred = Predict(model->model, set.x, set.rows);
    auto j = ComputeErrors(pred, recs).ToJson();
    if (held_out_mask != 0) {
      std::vector<float> pin, pout;
      std::vector<DatasetRecord> rin, rout;
      for (size_t i = 0; i < recs.size(); ++i) {
        const bool out = (CategoryBit(recs[i].category) & held_out_mask) != 0;
        (out ? pout : pin).push_back(pred[i]);
        (out ? rout : rin).push_back(recs[i]);
      }
      nlohmann::ordered_json groups;
      if (!rin.empty()) groups["held_in"] = StatsOf(ComputeErrors(pin, rin).overall);
      if (!rout.empty()) groups["held_out"] = StatsOf(ComputeErrors(pout, rout).overall);
      if (!rin.empty() && !rout.empty()) {
        groups["held_in_not_worse"] =
            groups["held_in"]["rms_phon"].get<double>() <= groups["held_out"]["rms_phon"].get<double>();
      }
      j["groups"] = groups;
    }
    *json = CopyString(j.dump(2) + "\n");
  });
}

ln_status ln_eval_histogram_csv(const ln_model* model, const ln_dataset* ds, double bin_width,
                                char** csv) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(ds, "dataset");
    NotNull(csv, "output");
    const auto set = MakeTrainingSet(ds->ds.records);
    auto pred = Predict(model->model, set.x, set.rows);
    for (auto& p : pred) p = std::max(0.0f, p);
    *csv = CopyString(LoudnessHistogram(pred, bin_width).ToCsv());
  });
}

ln_status ln_eval_tone_curves_csv(const ln_model* model, const ln_oracle* oracle, char** csv) {
  return Guard([&] {
    NotNull(csv, "output");
    Require(model != nullptr || oracle != nullptr, "need a model or an oracle");
    std::vector<CurveSeries> series;
    if (model != nullptr) {
      for (auto& s : ToneGrowthCurves(ModelPredictor(model->model), "dnn")) series.push_back(s);
    }
    if (oracle != nullptr) {
      for (auto& s : ToneGrowthCurves(OraclePredictor(oracle->oracle), "oracle")) series.push_back(s);
    }
    *csv = CopyString(CurvesCsv("level_db", series));
  });
}

ln_status ln_eval_bandwidth_curves_csv(const ln_model* model, const ln_oracle* oracle,
                                       char** csv) {
  return Guard([&] {
    NotNull(csv, "output");
    Require(model != nullptr || oracle != nullptr, "need a model or an oracle");
    std::vector<CurveSeries> series;
    if (model != nullptr) series.push_back(BandwidthCurve(ModelPredictor(model->model), "dnn"));
    if (oracle != nullptr) series.push_back(BandwidthCurve(OraclePredictor(oracle->oracle), "oracle"));
    *csv = CopyString(CurvesCsv("bandwidth_hz", series));
  });
}

ln_status ln_bench_json(const ln_model* model, const ln_oracle* oracle, double duration_s,
                        char** json) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(oracle, "oracle");
    NotNull(json, "output");
    *json = CopyString(BenchThroughput(model->model, oracle->oracle, duration_s).ToJson().dump(2) +
                       "\n");
  });
}

// ---- streaming ----

ln_status ln_stream_create(double sample_rate, int hop, int dft_size, ln_calibration cal,
                           const ln_model* model, const ln_oracle* oracle, ln_stream** out) {
  return Guard([&] {
    NotNull(out, "output");
    Require((model == nullptr) != (oracle == nullptr), "give exactly one of model and oracle");
    FrameLabeler labeler =
        model != nullptr ? ModelLabeler(model->model) : OracleLabeler(oracle->oracle);
    auto s = std::make_unique<ln_stream>();
    s->proc = std::make_unique<StreamProcessor>(sample_rate, hop, dft_size, ToCal(cal),
                                                std::move(labeler));
    *out = s.release();
  });
}

ln_status ln_stream_push(ln_stream* s, const float* samples, size_t n, ln_frame_callback callback,
                         void* user) {
  return Guard([&] {
    NotNull(s, "stream");
    if (callback == nullptr) Fail(ErrorCode::kInvalidArgument, "callback must not be NULL");
    if (n == 0) return;
    NotNull(samples, "samples");
    s->proc->Push(std::span(samples, n), [&](double t, double p) { callback(t, p, user); });
  });
}

ln_status ln_stream_finish(ln_stream* s, ln_frame_callback callback, void* user) {
  return Guard([&] {
    NotNull(s, "stream");
    if (callback == nullptr) Fail(ErrorCode::kInvalidArgument, "callback must not be NULL");
    s->proc->Finish([&](double t, double p) { callback(t, p, user); });
  });
}

void ln_stream_free(ln_stream* s) { delete s; }

// ---- audio input ----

ln_status ln_audio_open_wav(const char* path, ln_audio_reader** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "output");
    auto r = std::make_unique<ln_audio_reader>();
    r->wav = WavReader::Open(std::strcmp(path, "-") == 0 ? "/dev/stdin" : path);
    r->sample_rate = r->wav->info().sample_rate;
    *out = r.release();
  });
}

ln_status ln_audio_open_raw(const char* path, ln_sample_format format, double sample_rate,
                            ln_audio_reader** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "output");
    Require(sample_rate > 0.0, "raw input needs a positive sample rate");
    SampleFormat f;
    switch (format) {
      case LN_PCM16: f = SampleFormat::kPcm16; break;
      case LN_FLOAT32: f = SampleFormat::kFloat32; break;
      default: Fail(ErrorCode::kInvalidArgument, "raw input supports s16 and f32 only");
    }
    auto r = std::make_unique<ln_audio_reader>();
    const char* p = std::strcmp(path, "-") == 0 ? "/dev/stdin" : path;
    r->raw_file = std::make_unique<std::ifstream>(p, std::ios::binary);
    if (!*r->raw_file) Fail(ErrorCode::kIo, std::string("cannot open ") + path);
    r->raw = std::make_unique<RawPcmReader>(*r->raw_file, f);
    r->sample_rate = sample_rate;
    *out = r.release();
  });
}

ln_status ln_audio_sample_rate(const ln_audio_reader* r, double* sample_rate) {
  return Guard([&] {
    NotNull(r, "reader");
    NotNull(sample_rate, "output");
    *sample_rate = r->sample_rate;
  });
}

ln_status ln_audio_read(ln_audio_reader* r, float* out, size_t capacity, size_t* n) {
  return Guard([&] {
    NotNull(r, "reader");
    NotNull(out, "buffer");
    NotNull(n, "count");
    const std::span<float> buf(out, capacity);
    *n = r->wav ? r->wav->Read(buf) : r->raw->Read(buf);
  });
}

void ln_audio_free(ln_audio_reader* r) { delete r; }

}  // extern "C"
