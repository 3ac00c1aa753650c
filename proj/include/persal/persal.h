/*
 * Copyright 2026 The persal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PERSAL_PERSAL_H
#define PERSAL_PERSAL_H

/*
 * C interface to the persal library: personalized saliency ground truth,
 * baselines and evaluation metrics.
 *
 * Objects are opaque handles created by persal_*_create / *_load functions
 * and released with the matching *_destroy. Every fallible call returns a
 * persal_status; on failure persal_last_error() describes the problem for
 * the calling thread. Output handles are only written on success.
 * Handles are immutable after creation and may be shared across threads.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PERSAL_BUILDING_LIBRARY)
#    define PERSAL_API __declspec(dllexport)
#  else
#    define PERSAL_API __declspec(dllimport)
#  endif
#else
#  define PERSAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum persal_status {
  PERSAL_OK = 0,
  PERSAL_E_INVALID_ARGUMENT = 1,
  PERSAL_E_ZERO_DIM = 2,
  PERSAL_E_DIM_MISMATCH = 3,
  PERSAL_E_EMPTY_LIST = 4,
  PERSAL_E_UNMAPPED_CATEGORY = 5,
  PERSAL_E_RATING_OUT_OF_RANGE = 6,
  PERSAL_E_TOO_MANY_SUPER_CATEGORIES = 7,
  PERSAL_E_CATEGORY_OUT_OF_RANGE = 8,
  PERSAL_E_CHANNEL_MISMATCH = 9,
  PERSAL_E_ZERO_VARIANCE = 10,
  PERSAL_E_NOT_NORMALIZED = 11,
  PERSAL_E_UNDEFINED_RATIO = 12,
  PERSAL_E_ZERO_MASS = 13,
  PERSAL_E_OUT_OF_RANGE = 14,
  PERSAL_E_BAD_MAGIC = 15,
  PERSAL_E_CHECKSUM_MISMATCH = 16,
  PERSAL_E_TRUNCATED_FILE = 17,
  PERSAL_E_IO = 18,
  PERSAL_E_PARSE = 19,
  PERSAL_E_INTERNAL = 100
} persal_status;

/* Nonzero for statuses caused by the filesystem (I/O, bad or damaged files). */
PERSAL_API int persal_status_is_io(persal_status status);
PERSAL_API const char* persal_status_name(persal_status status);
/* Message of the last failure on this thread; "" if none. */
PERSAL_API const char* persal_last_error(void);
PERSAL_API const char* persal_version(void);

/* Strings returned through char** are owned by the caller. */
PERSAL_API void persal_string_free(char* s);

/* ---- grids ------------------------------------------------------------- */

typedef struct persal_grid persal_grid;

typedef struct persal_grid_stats {
  double min, max, sum, mean, stddev;
} persal_grid_stats;

PERSAL_API persal_status persal_grid_create(size_t height, size_t width, const double* values,
                                            persal_grid** out);
PERSAL_API persal_status persal_grid_clone(const persal_grid* g, persal_grid** out);
PERSAL_API void persal_grid_destroy(persal_grid* g);
PERSAL_API size_t persal_grid_height(const persal_grid* g);
PERSAL_API size_t persal_grid_width(const persal_grid* g);
PERSAL_API int persal_grid_is_normalized(const persal_grid* g);
/* Copies height*width values (row-major) into out; capacity is in values. */
PERSAL_API persal_status persal_grid_values(const persal_grid* g, double* out, size_t capacity);

PERSAL_API persal_status persal_grid_read(const char* path, persal_grid** out);
PERSAL_API persal_status persal_grid_write(const persal_grid* g, const char* path);
PERSAL_API persal_status persal_grid_read_csv(const char* path, persal_grid** out);
PERSAL_API persal_status persal_grid_write_csv(const persal_grid* g, const char* path);
PERSAL_API persal_status persal_grid_export_pgm(const persal_grid* g, const char* path);

/* was_constant (optional) receives 1 when the input was constant. */
PERSAL_API persal_status persal_grid_minmax(const persal_grid* g, persal_grid** out,
                                            int* was_constant);
PERSAL_API persal_status persal_grid_softmax(const persal_grid* g, double scale,
                                             persal_grid** out);
PERSAL_API persal_status persal_grid_normalize_sum(const persal_grid* g, persal_grid** out);
PERSAL_API persal_status persal_grid_resample(const persal_grid* g, size_t height, size_t width,
                                              persal_grid** out);
PERSAL_API persal_status persal_grid_stats_of(const persal_grid* g, persal_grid_stats* out);

PERSAL_API persal_status persal_file_digest(const char* path, uint64_t* out);

/* ---- preferences and mappings ------------------------------------------ */

typedef struct persal_mapping persal_mapping;
typedef struct persal_pvec persal_pvec;

PERSAL_API persal_status persal_mapping_load(const char* path, persal_mapping** out);
PERSAL_API persal_status persal_mapping_parse(const char* json_text, persal_mapping** out);
/* The twelve-super-category COCO mapping. */
PERSAL_API persal_status persal_mapping_coco_default(persal_mapping** out);
PERSAL_API void persal_mapping_destroy(persal_mapping* m);
PERSAL_API size_t persal_mapping_n_super(const persal_mapping* m);
PERSAL_API const char* persal_mapping_super_name(const persal_mapping* m, size_t index);
PERSAL_API persal_status persal_mapping_to_json(const persal_mapping* m, char** out);

PERSAL_API persal_status persal_pvec_create(const char* const* names, const double* weights,
                                            size_t n, persal_pvec** out);
PERSAL_API persal_status persal_pvec_from_ratings(const char* const* names, const int* ratings,
                                                  size_t n, persal_pvec** out);
PERSAL_API persal_status persal_pvec_load(const char* path, persal_pvec** out);
PERSAL_API persal_status persal_pvec_load_ratings(const char* path, persal_pvec** out);
PERSAL_API persal_status persal_pvec_pad(const persal_pvec* p, size_t channels,
                                         persal_pvec** out);
PERSAL_API void persal_pvec_destroy(persal_pvec* p);
PERSAL_API size_t persal_pvec_size(const persal_pvec* p);
PERSAL_API double persal_pvec_weight(const persal_pvec* p, size_t index);
PERSAL_API const char* persal_pvec_name(const persal_pvec* p, size_t index);
PERSAL_API persal_status persal_pvec_to_json(const persal_pvec* p, char** out);

/* ---- image manifests --------------------------------------------------- */

/* Ordered per-image records: detections (or ground-truth boxes), image size,
 * optional timestamp and optional fixation grid (file reference or in-memory
 * for synthetic data). */
typedef struct persal_dataset persal_dataset;

PERSAL_API persal_status persal_dataset_load(const char* path, persal_dataset** out);
/* Every *.json file in name order; missing timestamps come from mtimes. */
PERSAL_API persal_status persal_dataset_load_dir(const char* dir, persal_dataset** out);

typedef struct persal_synthetic_options {
  size_t n_images;
  uint64_t seed;
  size_t image_width, image_height;
  size_t grid_height, grid_width;
  size_t min_objects, max_objects;
  const int* categories; /* NULL = library default */
  size_t n_categories;
  int off_center_category; /* -1 = none */
  int required_category;   /* -1 = none */
} persal_synthetic_options;

PERSAL_API void persal_synthetic_options_default(persal_synthetic_options* out);
PERSAL_API persal_status persal_dataset_synthetic(const persal_synthetic_options* options,
                                                  persal_dataset** out);
PERSAL_API void persal_dataset_destroy(persal_dataset* d);
PERSAL_API size_t persal_dataset_size(const persal_dataset* d);
PERSAL_API const char* persal_dataset_image_id(const persal_dataset* d, size_t index);
PERSAL_API persal_status persal_dataset_image_size(const persal_dataset* d, size_t index,
                                                   size_t* width, size_t* height);
PERSAL_API size_t persal_dataset_detection_count(const persal_dataset* d, size_t index);
/* Loads (or copies) the fixation map of an image. */
PERSAL_API persal_status persal_dataset_fixation(const persal_dataset* d, size_t index,
                                                 persal_grid** out);
PERSAL_API int persal_dataset_has_fixation(const persal_dataset* d, size_t index);

/* File the fixation map is read from, or NULL for in-memory maps. The
   pointer stays valid until the next call on the same thread. */
PERSAL_API const char* persal_dataset_fixation_path(const persal_dataset* d, size_t index);

/* Writes <dir>/manifest.json plus <dir>/fixations/<id>.fgrd for every image
   that has a fixation map. */
PERSAL_API persal_status persal_dataset_write(const persal_dataset* d, const char* dir);

/* Portable file name for an image id; free with persal_string_free. */
PERSAL_API persal_status persal_safe_file_stem(const char* id, char** out);

/* ---- preference extraction and the preference-fitting stream ----------- */

PERSAL_API persal_status persal_extract_preferences(const persal_dataset* history,
                                                    const persal_mapping* mapping, int64_t now,
                                                    int window_days, persal_pvec** out);

typedef struct persal_nms_config {
  double confidence_threshold;
  double iou_threshold;
} persal_nms_config;

/* preset: "voc" or "coco". */
PERSAL_API persal_status persal_nms_preset(const char* preset, persal_nms_config* out);

/* Replaces every image's detections by their NMS survivors. */
PERSAL_API persal_status persal_dataset_apply_nms(persal_dataset* d, const persal_nms_config* nms);

/* NMS -> class tensor -> mapping layer -> per-cell max, for one image. */
PERSAL_API persal_status persal_preference_map(const persal_dataset* d, size_t index,
                                               const persal_mapping* mapping,
                                               const persal_pvec* pvec,
                                               const persal_nms_config* nms, size_t height,
                                               size_t width, persal_grid** out);

/* ---- ground truth ------------------------------------------------------ */

typedef struct persal_weights {
  double alpha, beta, gamma;
} persal_weights;

PERSAL_API persal_status persal_final_weights(double alpha, double beta_fraction,
                                              persal_weights* out);

PERSAL_API persal_status persal_pmap(const persal_dataset* d, size_t index,
                                     const persal_mapping* mapping, const persal_pvec* pvec,
                                     size_t height, size_t width, persal_grid** out);

/* sal may be NULL to use the image's own fixation map. */
PERSAL_API persal_status persal_generate_psal(const persal_dataset* d, size_t index,
                                              const persal_grid* sal,
                                              const persal_mapping* mapping,
                                              const persal_pvec* pvec,
                                              const persal_weights* weights, size_t height,
                                              size_t width, double softmax_scale,
                                              persal_grid** out, int* was_constant);

PERSAL_API persal_status persal_center_prior(const persal_grid* const* sals, size_t n,
                                             persal_grid** out, int* was_constant);

/* ---- baselines --------------------------------------------------------- */

PERSAL_API persal_status persal_center_prior_baseline(const persal_grid* prior,
                                                      persal_grid** out);
PERSAL_API persal_status persal_detection_baseline(const persal_dataset* d, size_t index,
                                                   const persal_mapping* mapping,
                                                   const persal_pvec* pvec, double threshold,
                                                   uint64_t seed, size_t height, size_t width,
                                                   persal_grid** out, int* used_fallback);
/* Per-image seed derived from a run seed and an image id. */
PERSAL_API uint64_t persal_derive_seed(uint64_t seed, const char* key);

/* ---- metrics ----------------------------------------------------------- */

typedef enum persal_distance {
  PERSAL_DISTANCE_EUCLIDEAN = 0,
  PERSAL_DISTANCE_MANHATTAN = 1
} persal_distance;

typedef struct persal_emd_options {
  size_t max_resolution; /* default 32 */
  persal_distance distance;
} persal_emd_options;

PERSAL_API void persal_emd_options_default(persal_emd_options* out);

PERSAL_API persal_status persal_cc(const persal_grid* p, const persal_grid* q, double* out);
PERSAL_API persal_status persal_sim(const persal_grid* p, const persal_grid* q, double* out);
PERSAL_API persal_status persal_kld_judd(const persal_grid* p, const persal_grid* q, double* out);
PERSAL_API persal_status persal_kld_plain(const persal_grid* p, const persal_grid* q,
                                          double* out);
/* flow_count (optional) receives the number of nonzero flows in the plan. */
PERSAL_API persal_status persal_emd(const persal_grid* p, const persal_grid* q,
                                    const persal_emd_options* options, double* out,
                                    size_t* flow_count);

typedef struct persal_report persal_report;

typedef struct persal_report_means {
  double cc, sim, kld_judd, kld_plain, emd;
  size_t images, cc_excluded, failed;
} persal_report_means;

PERSAL_API persal_status persal_evaluate(const char* const* ids, const persal_grid* const* preds,
                                         const persal_grid* const* refs, size_t n,
                                         const persal_emd_options* options, size_t jobs,
                                         persal_report** out);
PERSAL_API void persal_report_destroy(persal_report* r);
PERSAL_API persal_status persal_report_means_of(const persal_report* r, persal_report_means* out);
PERSAL_API persal_status persal_report_csv(const persal_report* r, char** out);
PERSAL_API persal_status persal_report_json(const persal_report* r, char** out);

/* ---- weight tuning ----------------------------------------------------- */

typedef struct persal_sweep persal_sweep;

typedef struct persal_sweep_spec {
  const double* grid; /* alpha values or beta fractions */
  size_t grid_size;
  double fixed_alpha;         /* used by the ratio sweep */
  double fixed_beta_fraction; /* used by the alpha sweep */
} persal_sweep_spec;

typedef struct persal_sweep_candidate {
  persal_weights weights;
  double swept;
  double mean_cc, mean_sim, objective;
  size_t scored, cc_excluded;
  int failed;
} persal_sweep_candidate;

/* labels[i] is the reference map of dataset image i; sals[i] may be NULL
 * (or sals itself NULL) to use each image's own fixation map. */
PERSAL_API persal_status persal_sweep_alpha(const persal_dataset* d, const persal_grid* const* sals,
                                            const persal_grid* const* labels,
                                            const persal_mapping* mapping, const persal_pvec* pvec,
                                            const persal_sweep_spec* spec, size_t height,
                                            size_t width, size_t jobs, persal_sweep** out);
PERSAL_API persal_status persal_sweep_ratio(const persal_dataset* d, const persal_grid* const* sals,
                                            const persal_grid* const* labels,
                                            const persal_mapping* mapping, const persal_pvec* pvec,
                                            const persal_sweep_spec* spec, size_t height,
                                            size_t width, size_t jobs, persal_sweep** out);
PERSAL_API void persal_sweep_destroy(persal_sweep* s);
PERSAL_API size_t persal_sweep_size(const persal_sweep* s);
PERSAL_API persal_status persal_sweep_candidate_at(const persal_sweep* s, size_t index,
                                                   persal_sweep_candidate* out);
PERSAL_API size_t persal_sweep_best_index(const persal_sweep* s);
PERSAL_API persal_status persal_sweep_csv(const persal_sweep* s, char** out);

#ifdef __cplusplus
}
#endif

#endif /* PERSAL_PERSAL_H */
