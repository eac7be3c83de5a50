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

#ifndef LOUDNET_LOUDNET_H_
#define LOUDNET_LOUDNET_H_

/* C interface to the loudness toolkit. All objects are opaque handles.
 * Functions return LN_OK or an error status; ln_last_error() then holds a
 * message for the calling thread. Strings handed out by the library are
 * released with ln_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(LOUDNET_BUILDING_LIBRARY)
#define LN_API __attribute__((visibility("default")))
#else
#define LN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define LN_NUM_BANDS 61
#define LN_NUM_CATEGORIES 6

typedef enum ln_status {
  LN_OK = 0,
  LN_ERR_INVALID_ARGUMENT = 1,
  LN_ERR_IO = 2,
  LN_ERR_FORMAT = 3,
  LN_ERR_NUMERIC = 4,
  LN_ERR_STATE = 5,
  LN_ERR_INTERNAL = 6
} ln_status;

/* Category tags stored with every dataset record. */
typedef enum ln_category {
  LN_CAT_SPEECH = 0,
  LN_CAT_TONE = 1,
  LN_CAT_NOISE = 2,
  LN_CAT_MUSIC = 3,
  LN_CAT_EXTERNAL = 4,
  LN_CAT_NOTCHED = 5
} ln_category;

typedef enum ln_sample_format { LN_PCM16 = 0, LN_PCM24 = 1, LN_FLOAT32 = 2 } ln_sample_format;

typedef struct ln_oracle ln_oracle;
typedef struct ln_dataset ln_dataset;
typedef struct ln_model ln_model;
typedef struct ln_trainer ln_trainer;
typedef struct ln_stream ln_stream;
typedef struct ln_audio_reader ln_audio_reader;

LN_API const char* ln_version(void);
LN_API const char* ln_last_error(void);
LN_API void ln_string_free(char* s);

/* Hex FNV-1a hash of a file's bytes, for provenance records. */
LN_API ln_status ln_file_hash(const char* path, char** hex);

typedef struct ln_calibration {
  double full_scale_spl; /* dB SPL of a full-scale sinusoid */
  double floor_spl;      /* clamp for empty bands */
} ln_calibration;
LN_API ln_calibration ln_calibration_default(void);

/* ---- frontend ---- */
LN_API ln_status ln_band_edges(double edges[LN_NUM_BANDS + 1]);
LN_API ln_status ln_frame_count(size_t num_samples, int hop, int dft_size, size_t* count);
LN_API ln_status ln_category_parse(const char* name, int* category);
LN_API const char* ln_category_name(int category);

/* ---- oracle ---- */
/* ear_json may be NULL for the built-in outer/middle-ear table. */
LN_API ln_status ln_oracle_calibrate(const char* ear_json_path, ln_calibration cal,
                                     ln_oracle** out);
LN_API ln_status ln_oracle_load(const char* cache_path, ln_oracle** out);
LN_API ln_status ln_oracle_save(const ln_oracle* oracle, const char* cache_path);
/* spectra: n x 61 row-major dB SPL. sones may be NULL. */
LN_API ln_status ln_oracle_loudness(const ln_oracle* oracle, const float* spectra, size_t n,
                                    float* phon, float* sones);
LN_API ln_status ln_oracle_info_json(const ln_oracle* oracle, char** json);
LN_API void ln_oracle_free(ln_oracle* oracle);
/* Labels an SPF1 spectra file into an LBL1 label file. */
LN_API ln_status ln_oracle_label_file(const ln_oracle* oracle, const char* spectra_path,
                                      const char* labels_path, size_t* count);

/* ---- datasets ---- */
typedef struct ln_ingest_options {
  double target_spl;
  int hop;
  int dft_size;
  int category;
  ln_calibration cal;
  size_t max_records; /* 0 = unlimited */
} ln_ingest_options;
LN_API ln_ingest_options ln_ingest_options_default(void);

LN_API ln_status ln_dataset_create(ln_dataset** out);
LN_API ln_status ln_dataset_load(const char* path, ln_dataset** out);
LN_API ln_status ln_dataset_save(const ln_dataset* ds, const char* path);
LN_API void ln_dataset_free(ln_dataset* ds);
/* workers = 0 uses every hardware thread; output does not depend on it. */
LN_API ln_status ln_dataset_gen_tones(ln_dataset* ds, const ln_oracle* oracle, size_t count,
                                      uint64_t seed, int workers);
LN_API ln_status ln_dataset_gen_noises(ln_dataset* ds, const ln_oracle* oracle, size_t count,
                                       uint64_t seed, double notched_fraction, int workers);
/* Per-file failures do not abort the run; they are listed in report_json
 * (may be NULL). */
LN_API ln_status ln_dataset_ingest_wav(ln_dataset* ds, const ln_oracle* oracle,
                                       const char* const* paths, size_t n_paths,
                                       const ln_ingest_options* opts, char** report_json);
LN_API ln_status ln_dataset_import_labels(ln_dataset* ds, const char* spectra_path,
                                          const char* labels_path);
LN_API ln_status ln_dataset_append(ln_dataset* dst, const ln_dataset* src);
/* Records whose category bit (1 << category) is in held_out_mask go to
 * *held_out, the rest to *kept. */
LN_API ln_status ln_dataset_split(const ln_dataset* ds, uint32_t held_out_mask,
                                  ln_dataset** kept, ln_dataset** held_out);
LN_API ln_status ln_dataset_size(const ln_dataset* ds, size_t* n);
LN_API ln_status ln_dataset_counts(const ln_dataset* ds, uint64_t counts[LN_NUM_CATEGORIES]);
LN_API ln_status ln_dataset_record(const ln_dataset* ds, size_t index,
                                   float spectrum[LN_NUM_BANDS], float* phon, int* category);
/* Sets one header field from a JSON value. */
LN_API ln_status ln_dataset_set_header(ln_dataset* ds, const char* key, const char* json_value);
LN_API ln_status ln_dataset_header_json(const ln_dataset* ds, char** json);

/* ---- models ---- */
LN_API ln_status ln_model_init(uint64_t seed, ln_model** out);
LN_API ln_status ln_model_load(const char* path, ln_model** out);
LN_API ln_status ln_model_save(const ln_model* model, const char* path);
/* Raw (unclamped) network outputs for rows x 61 inputs. */
LN_API ln_status ln_model_predict(const ln_model* model, const float* x, size_t rows,
                                  float* out);
LN_API ln_status ln_model_info_json(const ln_model* model, char** json);
LN_API ln_status ln_model_set_metadata(ln_model* model, const char* key, const char* json_value);
LN_API void ln_model_free(ln_model* model);

/* ---- training ---- */
typedef struct ln_train_config {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  size_t batch_size;
  uint64_t shuffle_seed;
} ln_train_config;
LN_API ln_train_config ln_train_config_default(void);

/* Return 0 to stop after this epoch. */
typedef int (*ln_epoch_callback)(int epoch, double loss, double seconds, void* user);

/* Trains a copy of `model`. state_path (may be NULL) names an LDAS sidecar
 * to resume the optimizer from. */
LN_API ln_status ln_trainer_create(const ln_model* model, const ln_dataset* data,
                                   const ln_train_config* config, const char* state_path,
                                   ln_trainer** out);
LN_API ln_status ln_trainer_run(ln_trainer* trainer, int epochs, ln_epoch_callback callback,
                                void* user);
LN_API ln_status ln_trainer_epoch(const ln_trainer* trainer, int* epoch);
/* Writes dir/model_e{N}.ldnn plus its .ldas optimizer sidecar. */
LN_API ln_status ln_trainer_save_checkpoint(const ln_trainer* trainer, const char* dir,
                                            char** model_path);
LN_API ln_status ln_trainer_model(const ln_trainer* trainer, ln_model** copy);
LN_API ln_status ln_trainer_warnings_json(const ln_trainer* trainer, char** json);
LN_API void ln_trainer_free(ln_trainer* trainer);

/* ---- evaluation ---- */
/* Per-category and overall error of clamped predictions. With a nonzero
 * held_out_mask the report also groups records into held_in/held_out. */
LN_API ln_status ln_eval_errors_json(const ln_model* model, const ln_dataset* ds,
                                     uint32_t held_out_mask, char** json);
LN_API ln_status ln_eval_histogram_csv(const ln_model* model, const ln_dataset* ds,
                                       double bin_width, char** csv);
/* Either handle may be NULL; a column set is emitted for each one given. */
LN_API ln_status ln_eval_tone_curves_csv(const ln_model* model, const ln_oracle* oracle,
                                         char** csv);
LN_API ln_status ln_eval_bandwidth_curves_csv(const ln_model* model, const ln_oracle* oracle,
                                              char** csv);
LN_API ln_status ln_bench_json(const ln_model* model, const ln_oracle* oracle,
                               double duration_s, char** json);

/* ---- streaming ---- */
typedef void (*ln_frame_callback)(double time_s, double phon, void* user);

/* Exactly one of model/oracle must be non-NULL; the handle must outlive the
 * stream. */
LN_API ln_status ln_stream_create(double sample_rate, int hop, int dft_size, ln_calibration cal,
                                  const ln_model* model, const ln_oracle* oracle,
                                  ln_stream** out);
LN_API ln_status ln_stream_push(ln_stream* s, const float* samples, size_t n,
                                ln_frame_callback callback, void* user);
LN_API ln_status ln_stream_finish(ln_stream* s, ln_frame_callback callback, void* user);
LN_API void ln_stream_free(ln_stream* s);

/* ---- audio input ---- */
/* path "-" reads standard input. */
LN_API ln_status ln_audio_open_wav(const char* path, ln_audio_reader** out);
LN_API ln_status ln_audio_open_raw(const char* path, ln_sample_format format, double sample_rate,
                                   ln_audio_reader** out);
LN_API ln_status ln_audio_sample_rate(const ln_audio_reader* r, double* sample_rate);
/* *n = 0 signals end of input. */
LN_API ln_status ln_audio_read(ln_audio_reader* r, float* out, size_t capacity, size_t* n);
LN_API void ln_audio_free(ln_audio_reader* r);

#ifdef __cplusplus
}
#endif

#endif /* LOUDNET_LOUDNET_H_ */
