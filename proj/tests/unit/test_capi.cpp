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

// Exercises the shared library strictly through its C interface. Fixture files
// are written with the core helpers; everything under test goes through ln_*.

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "loudnet/loudnet.h"
#include "scratch_dir.hpp"
#include "spectrum_io.hpp"
#include "wav.hpp"

namespace {

using loudnet::testing::ScratchDir;

// Owns a malloc'd string returned by the library.
struct CStr {
  char* p = nullptr;
  ~CStr() { ln_string_free(p); }
  std::string str() const { return p ? p : ""; }
  nlohmann::json json() const { return nlohmann::json::parse(str()); }
};

struct Handles {
  ln_oracle* oracle = nullptr;
  ~Handles() { ln_oracle_free(oracle); }
};

ln_oracle* SharedOracle() {
  static Handles h;
  if (h.oracle == nullptr) {
    EXPECT_EQ(ln_oracle_calibrate(nullptr, ln_calibration_default(), &h.oracle), LN_OK)
        << ln_last_error();
  }
  return h.oracle;
}

std::vector<float> ToneSpectrum(double hz, double spl) {
  double edges[LN_NUM_BANDS + 1];
  EXPECT_EQ(ln_band_edges(edges), LN_OK);
  const auto cal = ln_calibration_default();
  std::vector<float> s(LN_NUM_BANDS, static_cast<float>(cal.floor_spl));
  for (int b = 0; b < LN_NUM_BANDS; ++b) {
    if (hz >= edges[b] && hz < edges[b + 1]) s[b] = static_cast<float>(spl);
  }
  return s;
}

std::vector<float> Sine(double hz, double amp, size_t n, double fs = 16000.0) {
  std::vector<float> x(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = static_cast<float>(amp * std::sin(2.0 * std::numbers::pi * hz * i / fs));
  }
  return x;
}

// Small labelled corpus built through the API.
ln_dataset* SmallDataset(size_t tones, size_t noises, uint64_t seed) {
  ln_dataset* ds = nullptr;
  EXPECT_EQ(ln_dataset_create(&ds), LN_OK);
  EXPECT_EQ(ln_dataset_gen_tones(ds, SharedOracle(), tones, seed, 1), LN_OK) << ln_last_error();
  if (noises == 0) return ds;
  EXPECT_EQ(ln_dataset_gen_noises(ds, SharedOracle(), noises, seed + 1, 0.3, 1), LN_OK)
      << ln_last_error();
  return ds;
}

std::vector<float> PredictAll(const ln_model* m, const ln_dataset* ds) {
  size_t n = 0;
  EXPECT_EQ(ln_dataset_size(ds, &n), LN_OK);
  std::vector<float> x(n * LN_NUM_BANDS), out(n);
  for (size_t i = 0; i < n; ++i) {
    float phon;
    int cat;
    EXPECT_EQ(ln_dataset_record(ds, i, &x[i * LN_NUM_BANDS], &phon, &cat), LN_OK);
  }
  EXPECT_EQ(ln_model_predict(m, x.data(), n, out.data()), LN_OK);
  return out;
}

TEST(CApiBasics, VersionAndStrings) {
  ASSERT_NE(ln_version(), nullptr);
  EXPECT_GT(std::string(ln_version()).size(), 0u);
  ln_string_free(nullptr);
  EXPECT_STREQ(ln_category_name(LN_CAT_NOTCHED), "notched");
  EXPECT_STREQ(ln_category_name(99), "unknown");
  int cat = -1;
  EXPECT_EQ(ln_category_parse("tone", &cat), LN_OK);
  EXPECT_EQ(cat, LN_CAT_TONE);
  EXPECT_EQ(ln_category_parse("violin", &cat), LN_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(ln_last_error()).find("violin"), std::string::npos);
}

TEST(CApiBasics, LastErrorClearedOnSuccess) {
  EXPECT_EQ(ln_dataset_create(nullptr), LN_ERR_INVALID_ARGUMENT);
  EXPECT_GT(std::string(ln_last_error()).size(), 0u);
  size_t k = 0;
  EXPECT_EQ(ln_frame_count(16000, 560, 1024, &k), LN_OK);
  EXPECT_STREQ(ln_last_error(), "");
  EXPECT_EQ(k, 28u);
  EXPECT_EQ(ln_frame_count(16000, 0, 1024, &k), LN_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ln_frame_count(16000, 560, 1000, &k), LN_ERR_INVALID_ARGUMENT);
}

TEST(CApiBasics, BandEdges) {
  double e[LN_NUM_BANDS + 1];
  ASSERT_EQ(ln_band_edges(e), LN_OK);
  EXPECT_DOUBLE_EQ(e[0], 0.0);
  EXPECT_NEAR(e[13], 200.0, 1e-9);
  EXPECT_NEAR(e[LN_NUM_BANDS], 200.0 * std::pow(2.0, 48.0 / 9.0), 1e-6);
  for (int b = 0; b < LN_NUM_BANDS; ++b) EXPECT_LT(e[b], e[b + 1]);
  EXPECT_EQ(ln_band_edges(nullptr), LN_ERR_INVALID_ARGUMENT);
}

TEST(CApiBasics, FileHash) {
  ScratchDir dir("capi_hash");
  const std::string p = dir / "x.txt";
  std::ofstream(p) << "abc";
  CStr h;
  ASSERT_EQ(ln_file_hash(p.c_str(), &h.p), LN_OK);
  EXPECT_EQ(h.str().size(), 16u);
  EXPECT_EQ(h.str().find_first_not_of("0123456789abcdef"), std::string::npos);
  CStr h2;
  EXPECT_EQ(ln_file_hash((dir / "missing").c_str(), &h2.p), LN_ERR_IO);
}

TEST(CApiOracle, ToneAnchor) {
  const auto s = ToneSpectrum(1000.0, 40.0);
  float phon = 0, sone = 0;
  ASSERT_EQ(ln_oracle_loudness(SharedOracle(), s.data(), 1, &phon, &sone), LN_OK);
  EXPECT_NEAR(phon, 40.0, 0.05);
  EXPECT_NEAR(sone, 1.0, 0.01);
  // sones is optional
  ASSERT_EQ(ln_oracle_loudness(SharedOracle(), s.data(), 1, &phon, nullptr), LN_OK);
  std::vector<float> bad = s;
  bad[3] = NAN;
  EXPECT_EQ(ln_oracle_loudness(SharedOracle(), bad.data(), 1, &phon, nullptr),
            LN_ERR_INVALID_ARGUMENT);
}

TEST(CApiOracle, CacheRoundTripAndErrors) {
  ScratchDir dir("capi_oracle");
  const std::string p = dir / "oracle.json";
  ASSERT_EQ(ln_oracle_save(SharedOracle(), p.c_str()), LN_OK);
  ln_oracle* o2 = nullptr;
  ASSERT_EQ(ln_oracle_load(p.c_str(), &o2), LN_OK) << ln_last_error();
  CStr a, b;
  ASSERT_EQ(ln_oracle_info_json(SharedOracle(), &a.p), LN_OK);
  ASSERT_EQ(ln_oracle_info_json(o2, &b.p), LN_OK);
  EXPECT_EQ(a.json()["calibration_hash"], b.json()["calibration_hash"]);
  const auto s = ToneSpectrum(3000.0, 70.0);
  float p1, p2;
  ln_oracle_loudness(SharedOracle(), s.data(), 1, &p1, nullptr);
  ln_oracle_loudness(o2, s.data(), 1, &p2, nullptr);
  EXPECT_EQ(p1, p2);
  ln_oracle_free(o2);

  ln_oracle* o3 = nullptr;
  EXPECT_EQ(ln_oracle_load((dir / "nope.json").c_str(), &o3), LN_ERR_IO);
  std::ofstream(dir / "garbage.json") << "{not json";
  EXPECT_EQ(ln_oracle_load((dir / "garbage.json").c_str(), &o3), LN_ERR_FORMAT);
  std::ofstream(dir / "ear.json") << R"({"bogus": 1})";
  EXPECT_EQ(ln_oracle_calibrate((dir / "ear.json").c_str(), ln_calibration_default(), &o3),
            LN_ERR_FORMAT);
  ln_calibration bad = ln_calibration_default();
  bad.floor_spl = bad.full_scale_spl + 1;
  EXPECT_EQ(ln_oracle_calibrate(nullptr, bad, &o3), LN_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(o3, nullptr);
}

TEST(CApiOracle, LabelFile) {
  ScratchDir dir("capi_label");
  loudnet::CalibrationSpec cal;
  std::vector<loudnet::SpectrumFrame> frames;
  for (double spl : {30.0, 60.0, 90.0}) {
    loudnet::SpectrumFrame f;
    const auto s = ToneSpectrum(1000.0, spl);
    std::copy(s.begin(), s.end(), f.levels.begin());
    frames.push_back(f);
  }
  const std::string sp = dir / "in.spf", lp = dir / "out.lbl";
  loudnet::WriteSpectrumFile(sp, frames, cal);
  size_t count = 0;
  ASSERT_EQ(ln_oracle_label_file(SharedOracle(), sp.c_str(), lp.c_str(), &count), LN_OK)
      << ln_last_error();
  EXPECT_EQ(count, 3u);
  const auto phons = loudnet::ReadLabelFile(lp);
  ASSERT_EQ(phons.size(), 3u);
  EXPECT_NEAR(phons[0], 30.0, 0.1);
  EXPECT_NEAR(phons[1], 60.0, 0.1);
  EXPECT_NEAR(phons[2], 90.0, 0.1);

  // import the same pair as a dataset
  ln_dataset* ds = nullptr;
  ASSERT_EQ(ln_dataset_create(&ds), LN_OK);
  ASSERT_EQ(ln_dataset_import_labels(ds, sp.c_str(), lp.c_str()), LN_OK) << ln_last_error();
  size_t n = 0;
  ln_dataset_size(ds, &n);
  EXPECT_EQ(n, 3u);
  uint64_t counts[LN_NUM_CATEGORIES];
  ln_dataset_counts(ds, counts);
  EXPECT_EQ(counts[LN_CAT_EXTERNAL], 3u);
  loudnet::WriteLabelFile(lp, {1.0f, 2.0f});
  EXPECT_NE(ln_dataset_import_labels(ds, sp.c_str(), lp.c_str()), LN_OK);
  ln_dataset_free(ds);
}

TEST(CApiDataset, GenerateSaveLoadSplit) {
  ScratchDir dir("capi_ds");
  ln_dataset* ds = SmallDataset(200, 100, 5);
  size_t n = 0;
  ASSERT_EQ(ln_dataset_size(ds, &n), LN_OK);
  EXPECT_EQ(n, 300u);
  uint64_t counts[LN_NUM_CATEGORIES] = {};
  ASSERT_EQ(ln_dataset_counts(ds, counts), LN_OK);
  EXPECT_EQ(counts[LN_CAT_TONE], 200u);
  EXPECT_EQ(counts[LN_CAT_NOISE] + counts[LN_CAT_NOTCHED], 100u);
  EXPECT_GT(counts[LN_CAT_NOTCHED], 0u);

  float spec[LN_NUM_BANDS], phon;
  int cat;
  ASSERT_EQ(ln_dataset_record(ds, 0, spec, &phon, &cat), LN_OK);
  EXPECT_EQ(cat, LN_CAT_TONE);
  float oracle_phon;
  ln_oracle_loudness(SharedOracle(), spec, 1, &oracle_phon, nullptr);
  EXPECT_EQ(phon, oracle_phon);
  EXPECT_EQ(ln_dataset_record(ds, n, spec, &phon, &cat), LN_ERR_INVALID_ARGUMENT);

  ASSERT_EQ(ln_dataset_set_header(ds, "note", R"("capi")"), LN_OK);
  EXPECT_EQ(ln_dataset_set_header(ds, "note", "{broken"), LN_ERR_INVALID_ARGUMENT);
  const std::string p = dir / "d.lds";
  ASSERT_EQ(ln_dataset_save(ds, p.c_str()), LN_OK) << ln_last_error();
  ln_dataset* back = nullptr;
  ASSERT_EQ(ln_dataset_load(p.c_str(), &back), LN_OK) << ln_last_error();
  CStr h;
  ASSERT_EQ(ln_dataset_header_json(back, &h.p), LN_OK);
  EXPECT_EQ(h.json()["note"], "capi");
  EXPECT_TRUE(h.json().contains("calibration_hash"));
  float spec2[LN_NUM_BANDS], phon2;
  ln_dataset_record(back, 0, spec2, &phon2, &cat);
  EXPECT_EQ(phon, phon2);
  EXPECT_EQ(std::vector<float>(spec, spec + LN_NUM_BANDS),
            std::vector<float>(spec2, spec2 + LN_NUM_BANDS));

  ln_dataset *kept = nullptr, *held = nullptr;
  ASSERT_EQ(ln_dataset_split(ds, 1u << LN_CAT_NOTCHED, &kept, &held), LN_OK);
  size_t nk = 0, nh = 0;
  ln_dataset_size(kept, &nk);
  ln_dataset_size(held, &nh);
  EXPECT_EQ(nh, counts[LN_CAT_NOTCHED]);
  EXPECT_EQ(nk + nh, n);
  uint64_t kc[LN_NUM_CATEGORIES];
  ln_dataset_counts(kept, kc);
  EXPECT_EQ(kc[LN_CAT_NOTCHED], 0u);

  // truncated file
  {
    std::ifstream in(p, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    std::ofstream(dir / "t.lds", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  }
  ln_dataset* bad = nullptr;
  EXPECT_EQ(ln_dataset_load((dir / "t.lds").c_str(), &bad), LN_ERR_FORMAT);
  EXPECT_EQ(ln_dataset_load((dir / "none.lds").c_str(), &bad), LN_ERR_IO);

  ln_dataset_free(kept);
  ln_dataset_free(held);
  ln_dataset_free(back);
  ln_dataset_free(ds);
}

TEST(CApiDataset, AppendRefusesMixedCalibrations) {
  ln_dataset* a = SmallDataset(20, 0, 1);
  ln_dataset* b = SmallDataset(20, 0, 2);
  ASSERT_EQ(ln_dataset_append(a, b), LN_OK);
  size_t n = 0;
  ln_dataset_size(a, &n);
  EXPECT_EQ(n, 40u);

  ln_calibration cal = ln_calibration_default();
  cal.full_scale_spl -= 10.0;
  ln_oracle* other = nullptr;
  ASSERT_EQ(ln_oracle_calibrate(nullptr, cal, &other), LN_OK);
  ln_dataset* c = nullptr;
  ln_dataset_create(&c);
  ASSERT_EQ(ln_dataset_gen_tones(c, other, 10, 3, 1), LN_OK);
  EXPECT_EQ(ln_dataset_append(a, c), LN_ERR_STATE);
  ln_dataset_size(a, &n);
  EXPECT_EQ(n, 40u);
  ln_dataset_free(c);
  ln_oracle_free(other);
  ln_dataset_free(a);
  ln_dataset_free(b);
}

TEST(CApiDataset, GenerationIsWorkerIndependent) {
  ln_dataset *a = nullptr, *b = nullptr;
  ln_dataset_create(&a);
  ln_dataset_create(&b);
  ASSERT_EQ(ln_dataset_gen_noises(a, SharedOracle(), 64, 9, 0.5, 1), LN_OK);
  ASSERT_EQ(ln_dataset_gen_noises(b, SharedOracle(), 64, 9, 0.5, 3), LN_OK);
  for (size_t i = 0; i < 64; ++i) {
    float sa[LN_NUM_BANDS], sb[LN_NUM_BANDS], pa, pb;
    int ca, cb;
    ln_dataset_record(a, i, sa, &pa, &ca);
    ln_dataset_record(b, i, sb, &pb, &cb);
    ASSERT_EQ(pa, pb) << i;
    ASSERT_EQ(ca, cb) << i;
  }
  EXPECT_EQ(ln_dataset_gen_noises(a, SharedOracle(), 4, 9, 1.5, 1), LN_ERR_INVALID_ARGUMENT);
  ln_dataset_free(a);
  ln_dataset_free(b);
}

TEST(CApiDataset, IngestWav) {
  ScratchDir dir("capi_ingest");
  const std::string good = dir / "tone.wav";
  loudnet::WriteWav(good, Sine(1000.0, 0.3, 16000), 16000.0);
  std::ofstream(dir / "junk.wav") << "RIFFnope";
  const std::string junk = dir / "junk.wav";
  const char* paths[] = {good.c_str(), junk.c_str()};
  ln_ingest_options opts = ln_ingest_options_default();
  EXPECT_DOUBLE_EQ(opts.target_spl, 60.0);
  EXPECT_EQ(opts.hop, 560);
  EXPECT_EQ(opts.dft_size, 1024);
  ln_dataset* ds = nullptr;
  ln_dataset_create(&ds);
  CStr report;
  ASSERT_EQ(ln_dataset_ingest_wav(ds, SharedOracle(), paths, 2, &opts, &report.p), LN_OK)
      << ln_last_error();
  size_t n = 0;
  ln_dataset_size(ds, &n);
  EXPECT_EQ(n, 28u);
  const auto r = report.json();
  EXPECT_GE(r.dump().find("junk.wav"), 0u);
  EXPECT_NE(r.dump().find("junk.wav"), std::string::npos);
  float spec[LN_NUM_BANDS], phon;
  int cat;
  ln_dataset_record(ds, 10, spec, &phon, &cat);
  EXPECT_EQ(cat, LN_CAT_SPEECH);
  // a steady 60 dB tone sits near 60 phon
  EXPECT_NEAR(phon, 60.0, 2.0);
  ln_dataset_free(ds);
}

TEST(CApiModel, InitPredictSaveLoad) {
  ScratchDir dir("capi_model");
  ln_model* m = nullptr;
  ASSERT_EQ(ln_model_init(42, &m), LN_OK);
  CStr info;
  ASSERT_EQ(ln_model_info_json(m, &info.p), LN_OK);
  EXPECT_EQ(info.json()["dims"], nlohmann::json({61, 150, 150, 150, 1}));
  EXPECT_EQ(info.json()["parameters"], 61 * 150 + 150 + 2 * (150 * 150 + 150) + 151);

  std::vector<float> x;
  for (double spl : {20.0, 50.0, 80.0}) {
    const auto s = ToneSpectrum(500.0, spl);
    x.insert(x.end(), s.begin(), s.end());
  }
  std::vector<float> y(3), z(3);
  ASSERT_EQ(ln_model_predict(m, x.data(), 3, y.data()), LN_OK);
  for (float v : y) EXPECT_TRUE(std::isfinite(v));

  ASSERT_EQ(ln_model_set_metadata(m, "origin", R"({"who":"capi"})"), LN_OK);
  EXPECT_EQ(ln_model_set_metadata(m, "origin", "nope"), LN_ERR_INVALID_ARGUMENT);
  const std::string p = dir / "m.ldnn";
  ASSERT_EQ(ln_model_save(m, p.c_str()), LN_OK);
  ln_model* back = nullptr;
  ASSERT_EQ(ln_model_load(p.c_str(), &back), LN_OK) << ln_last_error();
  ASSERT_EQ(ln_model_predict(back, x.data(), 3, z.data()), LN_OK);
  EXPECT_EQ(y, z);
  CStr info2;
  ln_model_info_json(back, &info2.p);
  EXPECT_EQ(info2.json()["metadata"]["origin"]["who"], "capi");

  ln_model* other = nullptr;
  ln_model_init(43, &other);
  ln_model_predict(other, x.data(), 3, z.data());
  EXPECT_NE(y, z);

  std::ofstream(dir / "bad.ldnn") << "LDNNxxxxxxxx";
  ln_model* bad = nullptr;
  EXPECT_EQ(ln_model_load((dir / "bad.ldnn").c_str(), &bad), LN_ERR_FORMAT);
  EXPECT_EQ(ln_model_predict(m, nullptr, 3, z.data()), LN_ERR_INVALID_ARGUMENT);
  // zero rows is a no-op
  EXPECT_EQ(ln_model_predict(m, nullptr, 0, nullptr), LN_OK);
  ln_model_free(other);
  ln_model_free(back);
  ln_model_free(m);
}

struct EpochLog {
  std::vector<int> epochs;
  std::vector<double> losses;
  int stop_after = -1;
};

int LogEpoch(int epoch, double loss, double, void* user) {
  auto* log = static_cast<EpochLog*>(user);
  log->epochs.push_back(epoch);
  log->losses.push_back(loss);
  return log->stop_after > 0 && epoch >= log->stop_after ? 0 : 1;
}

TEST(CApiTrainer, RunCheckpointResume) {
  ScratchDir dir("capi_train");
  ln_dataset* ds = SmallDataset(300, 200, 21);
  ln_model* init = nullptr;
  ln_model_init(7, &init);
  ln_train_config cfg = ln_train_config_default();
  EXPECT_DOUBLE_EQ(cfg.learning_rate, 1e-3);
  EXPECT_DOUBLE_EQ(cfg.beta1, 0.9);
  EXPECT_DOUBLE_EQ(cfg.beta2, 0.999);
  cfg.batch_size = 32;

  // uninterrupted: 4 epochs
  ln_trainer* full = nullptr;
  ASSERT_EQ(ln_trainer_create(init, ds, &cfg, nullptr, &full), LN_OK) << ln_last_error();
  EpochLog log;
  ASSERT_EQ(ln_trainer_run(full, 4, LogEpoch, &log), LN_OK);
  EXPECT_EQ(log.epochs, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_LT(log.losses.back(), log.losses.front());
  ln_model* full_model = nullptr;
  ln_trainer_model(full, &full_model);

  // 2 epochs, checkpoint, fresh trainer from the files, 2 more
  ln_trainer* first = nullptr;
  ASSERT_EQ(ln_trainer_create(init, ds, &cfg, nullptr, &first), LN_OK);
  ASSERT_EQ(ln_trainer_run(first, 2, nullptr, nullptr), LN_OK);
  CStr path;
  ASSERT_EQ(ln_trainer_save_checkpoint(first, dir.path().c_str(), &path.p), LN_OK);
  EXPECT_NE(path.str().find("model_e2.ldnn"), std::string::npos);
  ln_model* ck = nullptr;
  ASSERT_EQ(ln_model_load(path.p, &ck), LN_OK);
  const std::string state = path.str().substr(0, path.str().size() - 5) + ".ldas";
  ln_trainer* second = nullptr;
  ASSERT_EQ(ln_trainer_create(ck, ds, &cfg, state.c_str(), &second), LN_OK) << ln_last_error();
  int epoch = 0;
  ln_trainer_epoch(second, &epoch);
  EXPECT_EQ(epoch, 2);
  ASSERT_EQ(ln_trainer_run(second, 2, nullptr, nullptr), LN_OK);
  ln_model* resumed = nullptr;
  ln_trainer_model(second, &resumed);
  EXPECT_EQ(PredictAll(full_model, ds), PredictAll(resumed, ds));

  // a state file cannot be paired with another model
  ln_trainer* wrong = nullptr;
  EXPECT_NE(ln_trainer_create(init, ds, &cfg, state.c_str(), &wrong), LN_OK);
  EXPECT_EQ(wrong, nullptr);

  CStr warn;
  ASSERT_EQ(ln_trainer_warnings_json(full, &warn.p), LN_OK);
  EXPECT_TRUE(warn.json().is_array());

  for (auto* m : {init, full_model, ck, resumed}) ln_model_free(m);
  for (auto* t : {full, first, second}) ln_trainer_free(t);
  ln_dataset_free(ds);
}

TEST(CApiTrainer, CallbackStopsAndConfigValidated) {
  ln_dataset* ds = SmallDataset(64, 0, 3);
  ln_model* m = nullptr;
  ln_model_init(1, &m);
  ln_trainer* t = nullptr;
  ASSERT_EQ(ln_trainer_create(m, ds, nullptr, nullptr, &t), LN_OK);
  EpochLog log;
  log.stop_after = 2;
  ASSERT_EQ(ln_trainer_run(t, 10, LogEpoch, &log), LN_OK);
  int epoch = 0;
  ln_trainer_epoch(t, &epoch);
  EXPECT_EQ(epoch, 2);
  EXPECT_EQ(log.epochs.size(), 2u);

  ln_train_config cfg = ln_train_config_default();
  cfg.batch_size = 0;
  ln_trainer* bad = nullptr;
  EXPECT_EQ(ln_trainer_create(m, ds, &cfg, nullptr, &bad), LN_ERR_INVALID_ARGUMENT);
  cfg = ln_train_config_default();
  cfg.beta1 = 1.0;
  EXPECT_EQ(ln_trainer_create(m, ds, &cfg, nullptr, &bad), LN_ERR_INVALID_ARGUMENT);
  ln_dataset* empty = nullptr;
  ln_dataset_create(&empty);
  EXPECT_NE(ln_trainer_create(m, empty, nullptr, nullptr, &bad), LN_OK);
  ln_dataset_free(empty);
  ln_trainer_free(t);
  ln_model_free(m);
  ln_dataset_free(ds);
}

TEST(CApiEval, ReportsHaveExpectedShape) {
  ln_dataset* ds = SmallDataset(100, 100, 8);
  ln_model* m = nullptr;
  ln_model_init(5, &m);

  CStr errs;
  ASSERT_EQ(ln_eval_errors_json(m, ds, 1u << LN_CAT_NOTCHED, &errs.p), LN_OK)
      << ln_last_error();
  const auto j = errs.json();
  ASSERT_TRUE(j.contains("groups"));
  EXPECT_TRUE(j["groups"].contains("held_in"));
  EXPECT_TRUE(j["groups"].contains("held_out"));
  CStr plain;
  ASSERT_EQ(ln_eval_errors_json(m, ds, 0, &plain.p), LN_OK);
  EXPECT_FALSE(plain.json().contains("groups"));

  CStr hist;
  ASSERT_EQ(ln_eval_histogram_csv(m, ds, 1.0, &hist.p), LN_OK);
  EXPECT_EQ(hist.str().rfind("phon_lo,phon_hi,proportion", 0), 0u) << hist.str().substr(0, 40);
  EXPECT_EQ(ln_eval_histogram_csv(m, ds, 0.0, &hist.p), LN_ERR_INVALID_ARGUMENT);

  CStr tones;
  ASSERT_EQ(ln_eval_tone_curves_csv(m, SharedOracle(), &tones.p), LN_OK);
  EXPECT_NE(tones.str().find("3000"), std::string::npos);
  CStr bw;
  ASSERT_EQ(ln_eval_bandwidth_curves_csv(m, SharedOracle(), &bw.p), LN_OK);
  const std::string bw_csv = bw.str();
  EXPECT_GT(std::count(bw_csv.begin(), bw_csv.end(), '\n'), 5);

  CStr bench;
  ASSERT_EQ(ln_bench_json(m, SharedOracle(), 0.3, &bench.p), LN_OK);
  EXPECT_GT(bench.json().size(), 0u);
  ln_model_free(m);
  ln_dataset_free(ds);
}

struct Frames {
  std::vector<double> t, phon;
};

void OnFrame(double t, double phon, void* user) {
  auto* f = static_cast<Frames*>(user);
  f->t.push_back(t);
  f->phon.push_back(phon);
}

TEST(CApiStream, ExactlyOneLabeler) {
  ln_model* m = nullptr;
  ln_model_init(1, &m);
  const auto cal = ln_calibration_default();
  ln_stream* s = nullptr;
  EXPECT_EQ(ln_stream_create(16000, 560, 1024, cal, nullptr, nullptr, &s),
            LN_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(ln_stream_create(16000, 560, 1024, cal, m, SharedOracle(), &s),
            LN_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(s, nullptr);
  EXPECT_EQ(ln_stream_create(8000, 560, 1024, cal, m, nullptr, &s), LN_ERR_INVALID_ARGUMENT);
  ln_model_free(m);
}

TEST(CApiStream, OracleStreamOfToneAndSilence) {
  const auto cal = ln_calibration_default();
  ln_stream* s = nullptr;
  ASSERT_EQ(ln_stream_create(16000, 560, 1024, cal, nullptr, SharedOracle(), &s), LN_OK);
  // full-scale sine amplitude a gives full_scale + 20 log10(a) dB
  const double amp = std::pow(10.0, (70.0 - cal.full_scale_spl) / 20.0);
  const auto x = Sine(1000.0, amp, 16000);
  Frames f;
  for (size_t i = 0; i < x.size(); i += 999) {
    const size_t n = std::min<size_t>(999, x.size() - i);
    ASSERT_EQ(ln_stream_push(s, x.data() + i, n, OnFrame, &f), LN_OK);
  }
  ASSERT_EQ(ln_stream_finish(s, OnFrame, &f), LN_OK);
  ASSERT_EQ(f.t.size(), 28u);
  EXPECT_DOUBLE_EQ(f.t[0], 0.0);
  EXPECT_NEAR(f.t[1], 0.035, 1e-12);
  EXPECT_NEAR(f.phon[5], 70.0, 1.5);
  EXPECT_EQ(ln_stream_push(s, x.data(), 10, OnFrame, &f), LN_ERR_STATE);
  ln_stream_free(s);

  ASSERT_EQ(ln_stream_create(16000, 560, 1024, cal, nullptr, SharedOracle(), &s), LN_OK);
  std::vector<float> silence(16000, 0.0f);
  Frames g;
  ASSERT_EQ(ln_stream_push(s, silence.data(), silence.size(), OnFrame, &g), LN_OK);
  ASSERT_EQ(ln_stream_finish(s, OnFrame, &g), LN_OK);
  ASSERT_EQ(g.phon.size(), 28u);
  for (double p : g.phon) EXPECT_EQ(p, 0.0);
  ln_stream_free(s);
}

TEST(CApiAudio, WavAndRawReaders) {
  ScratchDir dir("capi_audio");
  const auto x = Sine(440.0, 0.5, 5000, 22050.0);
  const std::string wav = dir / "a.wav";
  loudnet::WriteWav(wav, x, 22050.0, loudnet::SampleFormat::kFloat32);
  ln_audio_reader* r = nullptr;
  ASSERT_EQ(ln_audio_open_wav(wav.c_str(), &r), LN_OK) << ln_last_error();
  double fs = 0;
  ln_audio_sample_rate(r, &fs);
  EXPECT_DOUBLE_EQ(fs, 22050.0);
  std::vector<float> got, buf(1234);
  size_t n = 0;
  do {
    ASSERT_EQ(ln_audio_read(r, buf.data(), buf.size(), &n), LN_OK);
    got.insert(got.end(), buf.begin(), buf.begin() + n);
  } while (n > 0);
  EXPECT_EQ(got, x);
  ln_audio_free(r);

  const std::string raw = dir / "a.raw";
  {
    std::ofstream out(raw, std::ios::binary);
    for (int16_t v : {int16_t{0}, int16_t{16384}, int16_t{-32768}}) {
      out.write(reinterpret_cast<const char*>(&v), 2);
    }
  }
  ASSERT_EQ(ln_audio_open_raw(raw.c_str(), LN_PCM16, 16000, &r), LN_OK);
  ASSERT_EQ(ln_audio_read(r, buf.data(), buf.size(), &n), LN_OK);
  ASSERT_EQ(n, 3u);
  EXPECT_FLOAT_EQ(buf[1], 0.5f);
  EXPECT_FLOAT_EQ(buf[2], -1.0f);
  ln_audio_free(r);

  EXPECT_EQ(ln_audio_open_wav((dir / "missing.wav").c_str(), &r), LN_ERR_IO);
  std::ofstream(dir / "bad.wav") << "not a riff file at all";
  EXPECT_EQ(ln_audio_open_wav((dir / "bad.wav").c_str(), &r), LN_ERR_FORMAT);
  EXPECT_EQ(ln_audio_open_raw(raw.c_str(), LN_PCM16, 0.0, &r), LN_ERR_INVALID_ARGUMENT);
}

}  // namespace
