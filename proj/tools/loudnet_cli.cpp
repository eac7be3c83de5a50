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

// loudnet: command-line front end over the C API.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "loudnet/loudnet.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CliFailure {
  int code;
  std::string message;
};

[[noreturn]] void ConfigError(const std::string& msg) { throw CliFailure{kExitConfig, msg}; }

void Check(ln_status s, const std::string& what) {
  if (s == LN_OK) return;
  const int code = s == LN_ERR_INVALID_ARGUMENT ? kExitConfig : kExitRuntime;
  throw CliFailure{code, what + ": " + ln_last_error()};
}

struct Deleter {
  void operator()(ln_oracle* p) const { ln_oracle_free(p); }
  void operator()(ln_dataset* p) const { ln_dataset_free(p); }
  void operator()(ln_model* p) const { ln_model_free(p); }
  void operator()(ln_trainer* p) const { ln_trainer_free(p); }
  void operator()(ln_stream* p) const { ln_stream_free(p); }
  void operator()(ln_audio_reader* p) const { ln_audio_free(p); }
  void operator()(char* p) const { ln_string_free(p); }
};
template <typename T>
using Owned = std::unique_ptr<T, Deleter>;

std::string TakeString(char* s) {
  Owned<char> owned(s);
  return s != nullptr ? std::string(s) : std::string();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw CliFailure{kExitRuntime, "cannot write " + path.string()};
}

std::string FileHash(const std::string& path) {
  char* hex = nullptr;
  Check(ln_file_hash(path.c_str(), &hex), "hash " + path);
  return TakeString(hex);
}

uint32_t CategoryMask(const std::vector<std::string>& names) {
  uint32_t mask = 0;
  for (const auto& n : names) {
    int c = 0;
    Check(ln_category_parse(n.c_str(), &c), "--holdout");
    mask |= 1u << c;
  }
  return mask;
}

struct OracleOpts {
  std::string cache;
  std::string ear;
  double full_scale = 100.0;
  double floor = -10.0;

  void Add(CLI::App* app) {
    app->add_option("--oracle", cache, "Calibrated oracle cache (JSON) from `calibrate`")
        ->check(CLI::ExistingFile);
    app->add_option("--ear", ear, "Outer/middle-ear table (JSON [hz, db] pairs)")
        ->check(CLI::ExistingFile);
    app->add_option("--full-scale-spl", full_scale, "dB SPL of a full-scale sinusoid")
        ->capture_default_str();
    app->add_option("--floor-spl", floor, "Band level floor in dB SPL")->capture_default_str();
  }
  ln_calibration Cal() const { return {full_scale, floor}; }
  Owned<ln_oracle> Make() const {
    ln_oracle* o = nullptr;
    if (!cache.empty()) {
      Check(ln_oracle_load(cache.c_str(), &o), "load oracle " + cache);
    } else {
      Check(ln_oracle_calibrate(ear.empty() ? nullptr : ear.c_str(), Cal(), &o), "calibrate oracle");
    }
    return Owned<ln_oracle>(o);
  }
};

Owned<ln_dataset> LoadDatasets(const std::vector<std::string>& paths) {
  ln_dataset* all = nullptr;
  Check(ln_dataset_create(&all), "dataset");
  Owned<ln_dataset> out(all);
  for (const auto& p : paths) {
    ln_dataset* d = nullptr;
    Check(ln_dataset_load(p.c_str(), &d), "load " + p);
    Owned<ln_dataset> owned(d);
    Check(ln_dataset_append(out.get(), d), "merge " + p);
  }
  return out;
}

nlohmann::ordered_json Manifest(const CLI::App* sub, const std::vector<std::string>& inputs,
                                const std::vector<std::string>& outputs) {
  nlohmann::ordered_json m;
  m["tool"] = std::string("loudnet ") + ln_version();
  m["command"] = sub->get_name();
  m["config"] = sub->config_to_str(true, false);
  nlohmann::ordered_json in = nlohmann::ordered_json::object();
  for (const auto& p : inputs) in[p] = FileHash(p);
  m["inputs"] = in;
  m["outputs"] = outputs;
  return m;
}

std::vector<std::string> ExpandWavs(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    if (fs::is_directory(item)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(item)) {
        auto ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (e.is_regular_file() && ext == ".wav") found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(item);
    }
  }
  return out;
}

std::string PrintCounts(const ln_dataset* ds) {
  uint64_t counts[LN_NUM_CATEGORIES];
  Check(ln_dataset_counts(ds, counts), "counts");
  std::ostringstream os;
  for (int c = 0; c < LN_NUM_CATEGORIES; ++c) {
    if (counts[c] > 0) os << "  " << ln_category_name(c) << ": " << counts[c] << "\n";
  }
  return os.str();
}

// ---- synth ----

struct SynthArgs {
  std::string out;
  long long tones = -1, noises = -1;
  std::vector<std::string> wav;
  double spl = -1.0;
  std::string category = "speech";
  std::string import_spectra, import_labels;
  uint64_t seed = 1;
  double notched_fraction = 0.5;
  bool full = false;
  int workers = 0;
  int hop = 560, dft = 1024;
  size_t max_records = 0;
  OracleOpts oracle;
};

void RunSynth(const CLI::App* sub, SynthArgs& a) {
  if (a.import_spectra.empty() != a.import_labels.empty()) {
    ConfigError("--import-spectra and --import-labels go together");
  }
  const bool any_source = a.tones >= 0 || a.noises >= 0 || !a.wav.empty() || !a.import_spectra.empty();
  if (!any_source) {
    // Desk-scale synthetic corpora by default; --full is ten times larger.
    a.tones = a.full ? 700000 : 70000;
    a.noises = a.full ? 500000 : 50000;
  }
  auto oracle = a.oracle.Make();
  ln_dataset* raw = nullptr;
  Check(ln_dataset_create(&raw), "dataset");
  Owned<ln_dataset> ds(raw);
  if (a.tones > 0) {
    Check(ln_dataset_gen_tones(ds.get(), oracle.get(), static_cast<size_t>(a.tones), a.seed, a.workers),
          "tones");
  }
  if (a.noises > 0) {
    // Distinct stream from the tones so both can share --seed.
    Check(ln_dataset_gen_noises(ds.get(), oracle.get(), static_cast<size_t>(a.noises), a.seed + 1,
                                a.notched_fraction, a.workers),
          "noises");
  }
  if (!a.wav.empty()) {
    const auto files = ExpandWavs(a.wav);
    std::vector<const char*> ptrs;
    for (const auto& f : files) ptrs.push_back(f.c_str());
    ln_ingest_options io = ln_ingest_options_default();
    Check(ln_category_parse(a.category.c_str(), &io.category), "--category");
    if (io.category != LN_CAT_SPEECH && io.category != LN_CAT_MUSIC) {
      ConfigError("--category must be speech or music");
    }
    io.target_spl = a.spl >= 0.0 ? a.spl : (io.category == LN_CAT_MUSIC ? 70.0 : 60.0);
    io.hop = a.hop;
    io.dft_size = a.dft;
    io.cal = a.oracle.Cal();
    io.max_records = a.max_records;
    char* report = nullptr;
    Check(ln_dataset_ingest_wav(ds.get(), oracle.get(), ptrs.data(), ptrs.size(), &io, &report),
          "ingest");
    const auto rep = nlohmann::json::parse(TakeString(report));
    for (const auto& f : rep["failures"]) {
      std::cerr << "warning: skipped " << f["path"].get<std::string>() << ": "
                << f["error"].get<std::string>() << "\n";
    }
    if (files.empty()) std::cerr << "warning: no WAV files found\n";
  }
  if (!a.import_spectra.empty()) {
    Check(ln_dataset_import_labels(ds.get(), a.import_spectra.c_str(), a.import_labels.c_str()),
          "import");
  }
  // Worker count never changes the records, so keep it out of the file.
  std::string run_config;
  std::istringstream lines(sub->config_to_str(true, false));
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("workers=", 0) != 0) run_config += line + "\n";
  }
  const std::string config = nlohmann::json(run_config).dump();
  Check(ln_dataset_set_header(ds.get(), "run_config", config.c_str()), "header");
  Check(ln_dataset_save(ds.get(), a.out.c_str()), "save " + a.out);
  size_t n = 0;
  Check(ln_dataset_size(ds.get(), &n), "size");
  std::cout << "wrote " << a.out << " (" << n << " records)\n" << PrintCounts(ds.get());
}

// ---- calibrate / label ----

struct CalibrateArgs {
  std::string out;
  OracleOpts oracle;
};

void RunCalibrate(CalibrateArgs& a) {
  auto oracle = a.oracle.Make();
  Check(ln_oracle_save(oracle.get(), a.out.c_str()), "save " + a.out);
  char* info = nullptr;
  Check(ln_oracle_info_json(oracle.get(), &info), "info");
  std::cout << TakeString(info) << "\n";
}

struct LabelArgs {
  std::string spectra, out;
  OracleOpts oracle;
};

void RunLabel(LabelArgs& a) {
  auto oracle = a.oracle.Make();
  size_t n = 0;
  Check(ln_oracle_label_file(oracle.get(), a.spectra.c_str(), a.out.c_str(), &n), "label");
  std::cout << "labelled " << n << " spectra -> " << a.out << "\n";
}

// ---- train ----

struct TrainArgs {
  std::vector<std::string> data;
  std::string out;
  std::vector<std::string> holdout;
  std::vector<int> schedule = {220, 780, 4000};
  int epochs = 0;
  size_t batch = 256;
  double lr = 0.001;
  uint64_t seed = 1;
  std::string resume;
  bool quiet = false;
};

struct Progress {
  std::vector<std::pair<int, double>>* log;
  bool quiet;
  std::chrono::steady_clock::time_point t0;
};

int OnEpoch(int epoch, double loss, double, void* user) {
  auto* p = static_cast<Progress*>(user);
  p->log->emplace_back(epoch, loss);
  if (!p->quiet && (epoch % 10 == 0 || epoch == 1)) {
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - p->t0).count();
    std::fprintf(stderr, "epoch %5d  loss %.6f  (%.0f s)\n", epoch, loss, t);
  }
  return 1;
}

void RunTrain(const CLI::App* sub, TrainArgs& a) {
  for (int s : a.schedule) {
    if (s <= 0) ConfigError("--schedule stages must be positive");
  }
  std::vector<int> checkpoints;
  int total = 0;
  for (int s : a.schedule) checkpoints.push_back(total += s);
  const int target = a.epochs > 0 ? a.epochs : total;

  auto all = LoadDatasets(a.data);
  const uint32_t mask = CategoryMask(a.holdout);
  ln_dataset *kept_raw = nullptr, *held_raw = nullptr;
  Check(ln_dataset_split(all.get(), mask, &kept_raw, &held_raw), "split");
  Owned<ln_dataset> kept(kept_raw), held(held_raw);
  size_t n_train = 0, n_held = 0;
  Check(ln_dataset_size(kept.get(), &n_train), "size");
  Check(ln_dataset_size(held.get(), &n_held), "size");
  if (n_train == 0) throw CliFailure{kExitRuntime, "training set is empty"};

  ln_model* m = nullptr;
  std::string state_path;
  if (!a.resume.empty()) {
    Check(ln_model_load(a.resume.c_str(), &m), "load " + a.resume);
    state_path = fs::path(a.resume).replace_extension(".ldas").string();
    if (!fs::exists(state_path)) throw CliFailure{kExitRuntime, "missing optimizer state " + state_path};
  } else {
    Check(ln_model_init(a.seed, &m), "init");
  }
  Owned<ln_model> model(m);

  char* header = nullptr;
  Check(ln_dataset_header_json(all.get(), &header), "header");
  const auto h = nlohmann::json::parse(TakeString(header));
  nlohmann::ordered_json data_meta = nlohmann::ordered_json::object();
  for (const auto& p : a.data) data_meta[fs::path(p).filename().string()] = FileHash(p);
  Check(ln_model_set_metadata(model.get(), "seed", std::to_string(a.seed).c_str()), "meta");
  const std::string oracle_hash =
      nlohmann::json(h.value("calibration_hash", std::string("none"))).dump();
  Check(ln_model_set_metadata(model.get(), "oracle_hash", oracle_hash.c_str()), "meta");
  Check(ln_model_set_metadata(model.get(), "data", data_meta.dump().c_str()), "meta");
  Check(ln_model_set_metadata(model.get(), "held_out", nlohmann::json(a.holdout).dump().c_str()),
        "meta");
  Check(ln_model_set_metadata(model.get(), "train_records", std::to_string(n_train).c_str()), "meta");

  ln_train_config cfg = ln_train_config_default();
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.shuffle_seed = a.seed;
  ln_trainer* t = nullptr;
  Check(ln_trainer_create(model.get(), kept.get(), &cfg,
                          state_path.empty() ? nullptr : state_path.c_str(), &t),
        "trainer");
  Owned<ln_trainer> trainer(t);

  fs::create_directories(a.out);
  int epoch = 0;
  Check(ln_trainer_epoch(trainer.get(), &epoch), "epoch");
  std::cerr << "training on " << n_train << " records (" << n_held << " held out), epochs "
            << epoch << " -> " << target << "\n";
  std::vector<std::pair<int, double>> log;
  Progress progress{&log, a.quiet, std::chrono::steady_clock::now()};
  std::vector<std::string> written;
  std::vector<int> stops;
  for (int c : checkpoints) {
    if (c > epoch && c < target) stops.push_back(c);
  }
  if (target > epoch) stops.push_back(target);
  for (int stop : stops) {
    const ln_status s = ln_trainer_run(trainer.get(), stop - epoch, OnEpoch, &progress);
    if (s != LN_OK) {
      // The trainer has rolled back to the last finished epoch; keep it.
      const std::string why = ln_last_error();
      char* path = nullptr;
      if (ln_trainer_save_checkpoint(trainer.get(), a.out.c_str(), &path) == LN_OK) {
        std::cerr << "saved last good state to " << TakeString(path) << "\n";
      }
      throw CliFailure{kExitRuntime, "training failed: " + why};
    }
    epoch = stop;
    char* path = nullptr;
    Check(ln_trainer_save_checkpoint(trainer.get(), a.out.c_str(), &path), "checkpoint");
    written.push_back(fs::path(TakeString(path)).filename().string());
    std::cerr << "checkpoint " << written.back() << "\n";
  }

  std::string csv = "epoch,loss\n";
  char buf[64];
  for (const auto& [e, l] : log) {
    std::snprintf(buf, sizeof buf, "%d,%.9g\n", e, l);
    csv += buf;
  }
  WriteText(fs::path(a.out) / "loss.csv", csv);
  char* warn = nullptr;
  Check(ln_trainer_warnings_json(trainer.get(), &warn), "warnings");
  const auto warnings = nlohmann::json::parse(TakeString(warn));
  for (const auto& w : warnings) std::cerr << "soft check: " << w.get<std::string>() << "\n";
  written.push_back("loss.csv");
  std::vector<std::string> inputs = a.data;
  if (!a.resume.empty()) inputs.push_back(a.resume);
  auto manifest = Manifest(sub, inputs, written);
  manifest["soft_check_warnings"] = warnings;
  WriteText(fs::path(a.out) / "manifest.json", manifest.dump(2) + "\n");
}

// ---- eval ----

struct EvalArgs {
  std::string model;
  std::vector<std::string> data;
  std::vector<std::string> holdout;
  std::string out = "report";
  double bin_width = 1.0;
  OracleOpts oracle;
};

void RunEval(const CLI::App* sub, EvalArgs& a) {
  ln_model* m = nullptr;
  Check(ln_model_load(a.model.c_str(), &m), "load " + a.model);
  Owned<ln_model> model(m);
  auto ds = LoadDatasets(a.data);
  auto oracle = a.oracle.Make();
  fs::create_directories(a.out);
  const fs::path dir(a.out);
  char* s = nullptr;
  Check(ln_eval_errors_json(model.get(), ds.get(), CategoryMask(a.holdout), &s), "errors");
  const std::string errors = TakeString(s);
  WriteText(dir / "errors.json", errors);
  Check(ln_eval_histogram_csv(model.get(), ds.get(), a.bin_width, &s), "histogram");
  WriteText(dir / "hist.csv", TakeString(s));
  Check(ln_eval_tone_curves_csv(model.get(), oracle.get(), &s), "tone curves");
  WriteText(dir / "curves_tone_growth.csv", TakeString(s));
  Check(ln_eval_bandwidth_curves_csv(model.get(), oracle.get(), &s), "bandwidth curves");
  WriteText(dir / "curves_bandwidth.csv", TakeString(s));
  std::vector<std::string> inputs = a.data;
  inputs.insert(inputs.begin(), a.model);
  WriteText(dir / "manifest.json",
            Manifest(sub, inputs,
                     {"errors.json", "hist.csv", "curves_tone_growth.csv", "curves_bandwidth.csv"})
                    .dump(2) +
                "\n");
  const auto j = nlohmann::json::parse(errors);
  std::printf("%-10s %10s %10s %10s %10s\n", "category", "count", "rms", "mean", "max");
  auto row = [](const std::string& name, const nlohmann::json& st) {
    std::printf("%-10s %10llu %10.3f %10.3f %10.3f\n", name.c_str(),
                st["count"].get<unsigned long long>(), st["rms_phon"].get<double>(),
                st["mean_signed_phon"].get<double>(), st["max_abs_phon"].get<double>());
  };
  for (const auto& [name, st] : j["categories"].items()) row(name, st);
  row("overall", j["overall"]);
  if (j.contains("groups")) {
    for (const auto& [name, st] : j["groups"].items()) {
      if (st.is_object()) row(name, st);
    }
    if (j["groups"].value("held_in_not_worse", true) == false) {
      std::cerr << "soft check: held-in RMS exceeds held-out RMS\n";
    }
  }
}

// ---- bench ----

struct BenchArgs {
  std::string model;
  double duration = 10.0;
  std::string out;
  uint64_t seed = 1;
  OracleOpts oracle;
};

void RunBench(BenchArgs& a) {
  ln_model* m = nullptr;
  if (a.model.empty()) {
    Check(ln_model_init(a.seed, &m), "init");
  } else {
    Check(ln_model_load(a.model.c_str(), &m), "load " + a.model);
  }
  Owned<ln_model> model(m);
  auto oracle = a.oracle.Make();
  char* s = nullptr;
  Check(ln_bench_json(model.get(), oracle.get(), a.duration, &s), "bench");
  const std::string json = TakeString(s);
  if (!a.out.empty()) WriteText(a.out, json);
  std::cout << json;
}

// ---- stream ----

struct StreamArgs {
  std::string model;
  bool use_oracle = false;
  std::string wav, raw;
  double rate = 16000.0;
  std::string format = "s16";
  int hop = 560, dft = 1024;
  bool binary = false;
  OracleOpts oracle;
};

struct Emitter {
  bool binary;
  std::vector<char> buf;
  uint64_t frames = 0;

  static void Cb(double t, double phon, void* user) {
    auto* e = static_cast<Emitter*>(user);
    ++e->frames;
    if (e->binary) {
      const float v = static_cast<float>(phon);
      const auto* p = reinterpret_cast<const char*>(&v);
      e->buf.insert(e->buf.end(), p, p + sizeof v);
    } else {
      char line[64];
      const int n = std::snprintf(line, sizeof line, "%.6f %.3f\n", t, phon);
      e->buf.insert(e->buf.end(), line, line + n);
    }
    if (e->buf.size() >= (1 << 16)) e->Flush();
  }
  void Flush() {
    if (!buf.empty()) std::fwrite(buf.data(), 1, buf.size(), stdout);
    buf.clear();
  }
};

void RunStream(StreamArgs& a) {
  if (a.wav.empty() == a.raw.empty()) ConfigError("give exactly one of --wav and --raw");
  if (a.model.empty() == !a.use_oracle) ConfigError("give exactly one of --model and --use-oracle");
  Owned<ln_model> model;
  Owned<ln_oracle> oracle;
  if (a.use_oracle) {
    oracle = a.oracle.Make();
  } else {
    ln_model* m = nullptr;
    Check(ln_model_load(a.model.c_str(), &m), "load " + a.model);
    model.reset(m);
  }
  ln_audio_reader* r = nullptr;
  if (!a.wav.empty()) {
    Check(ln_audio_open_wav(a.wav.c_str(), &r), "open " + a.wav);
  } else {
    const ln_sample_format f = a.format == "f32" ? LN_FLOAT32 : LN_PCM16;
    Check(ln_audio_open_raw(a.raw.c_str(), f, a.rate, &r), "open " + a.raw);
  }
  Owned<ln_audio_reader> reader(r);
  double rate = 0.0;
  Check(ln_audio_sample_rate(reader.get(), &rate), "rate");
  ln_stream* s = nullptr;
  Check(ln_stream_create(rate, a.hop, a.dft, a.oracle.Cal(), model.get(), oracle.get(), &s),
        "stream");
  Owned<ln_stream> stream(s);
  Emitter emit{a.binary, {}, 0};
  std::vector<float> block(4096);
  for (;;) {
    size_t n = 0;
    Check(ln_audio_read(reader.get(), block.data(), block.size(), &n), "read");
    if (n == 0) break;
    Check(ln_stream_push(stream.get(), block.data(), n, &Emitter::Cb, &emit), "stream");
    emit.Flush();
  }
  Check(ln_stream_finish(stream.get(), &Emitter::Cb, &emit), "stream");
  emit.Flush();
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loudness oracle distillation toolkit"};
  app.set_version_flag("--version", std::string(ln_version()));
  app.set_config("--config", "", "TOML/INI config file; flags override it")
      ->envname("LOUDNET_CONFIG");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate or ingest a labelled dataset (LDS1)");
  s->add_option("-o,--out", synth.out, "Output dataset path")->required();
  s->add_option("--tones", synth.tones, "Number of tone-in-noise records");
  s->add_option("--noises", synth.noises, "Number of band-limited/notched noise records");
  s->add_option("--wav", synth.wav, "WAV files or directories to ingest");
  s->add_option("--spl", synth.spl, "RMS target for ingested audio (default 60, music 70)");
  s->add_option("--category", synth.category, "Category for ingested audio: speech|music")
      ->capture_default_str();
  s->add_option("--import-spectra", synth.import_spectra, "SPF1 spectra with external labels");
  s->add_option("--import-labels", synth.import_labels, "LBL1 labels matching --import-spectra");
  s->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  s->add_option("--notched-fraction", synth.notched_fraction, "Share of notched noises")
      ->capture_default_str();
  s->add_flag("--full", synth.full, "Full-size default corpora (700k tones, 500k noises)");
  s->add_option("--workers", synth.workers, "Worker threads (0 = all)");
  s->add_option("--hop", synth.hop, "Frame hop in samples")->capture_default_str();
  s->add_option("--dft", synth.dft, "DFT size")->capture_default_str();
  s->add_option("--max-records", synth.max_records, "Cap on ingested frames (0 = none)");
  synth.oracle.Add(s);

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Calibrate the oracle and write its cache");
  c->add_option("-o,--out", cal.out, "Output cache path")->required();
  cal.oracle.Add(c);

  LabelArgs label;
  auto* l = app.add_subcommand("label", "Oracle-label an SPF1 spectra file");
  l->add_option("--spectra", label.spectra, "Input SPF1 file")->required()->check(CLI::ExistingFile);
  l->add_option("-o,--out", label.out, "Output LBL1 file")->required();
  label.oracle.Add(l);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train the network on one or more datasets");
  t->add_option("--data", train.data, "Dataset files")->required()->check(CLI::ExistingFile);
  t->add_option("-o,--out", train.out, "Checkpoint directory")->required();
  t->add_option("--holdout", train.holdout, "Categories excluded from training")->delimiter(',');
  t->add_option("--schedule", train.schedule, "Epochs per stage, checkpoint after each")
      ->delimiter(',')
      ->capture_default_str();
  t->add_option("--epochs", train.epochs, "Stop after this many total epochs (0 = whole schedule)");
  t->add_option("--batch", train.batch, "Mini-batch size")->capture_default_str();
  t->add_option("--lr", train.lr, "Adam learning rate")->capture_default_str();
  t->add_option("--seed", train.seed, "Initialisation and shuffle seed")->capture_default_str();
  t->add_option("--resume", train.resume, "Checkpoint to continue from")->check(CLI::ExistingFile);
  t->add_flag("-q,--quiet", train.quiet, "No per-epoch progress");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Error tables, histogram and curves");
  e->add_option("--model", eval.model, "Model file")->required()->check(CLI::ExistingFile);
  e->add_option("--data", eval.data, "Dataset files")->required()->check(CLI::ExistingFile);
  e->add_option("--holdout", eval.holdout, "Categories that were held out of training")
      ->delimiter(',');
  e->add_option("-o,--out", eval.out, "Report directory")->capture_default_str();
  e->add_option("--bin-width", eval.bin_width, "Histogram bin width in phon")->capture_default_str();
  eval.oracle.Add(e);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Throughput of the network and the oracle");
  b->add_option("--model", bench.model, "Model file (default: a seeded untrained network)")
      ->check(CLI::ExistingFile);
  b->add_option("--duration", bench.duration, "Total wall-clock seconds")->capture_default_str();
  b->add_option("-o,--out", bench.out, "Write bench.json here");
  b->add_option("--seed", bench.seed, "Seed for the untrained network")->capture_default_str();
  bench.oracle.Add(b);

  StreamArgs stream;
  auto* st = app.add_subcommand("stream", "Per-frame loudness of a WAV or raw PCM stream");
  st->add_option("--model", stream.model, "Model file")->check(CLI::ExistingFile);
  st->add_flag("--use-oracle", stream.use_oracle, "Label with the oracle instead of a model");
  st->add_option("--wav", stream.wav, "WAV input ('-' for stdin)");
  st->add_option("--raw", stream.raw, "Headerless mono PCM input ('-' for stdin)");
  st->add_option("--rate", stream.rate, "Sample rate of --raw input")->capture_default_str();
  st->add_option("--format", stream.format, "Sample format of --raw input")
      ->check(CLI::IsMember({"s16", "f32"}))
      ->capture_default_str();
  st->add_option("--hop", stream.hop, "Frame hop in samples")->capture_default_str();
  st->add_option("--dft", stream.dft, "DFT size")->capture_default_str();
  st->add_flag("--binary", stream.binary, "Emit float32 phon values instead of text lines");
  stream.oracle.Add(st);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (s->parsed()) RunSynth(s, synth);
    if (c->parsed()) RunCalibrate(cal);
    if (l->parsed()) RunLabel(label);
    if (t->parsed()) RunTrain(t, train);
    if (e->parsed()) RunEval(e, eval);
    if (b->parsed()) RunBench(bench);
    if (st->parsed()) RunStream(stream);
  } catch (const CliFailure& f) {
    std::cerr << "loudnet: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& ex) {
    std::cerr << "loudnet: " << ex.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
