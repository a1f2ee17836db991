/*
 * Copyright 2026 The dkm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DKM_DKM_H_
#define DKM_DKM_H_

/* C interface to the dkm dense matcher. Every object is an opaque handle
 * created and destroyed through this header; every fallible call returns a
 * dkm_status and leaves a thread-local message for dkm_last_error(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DKM_BUILDING_LIBRARY)
#define DKM_API __declspec(dllexport)
#else
#define DKM_API __declspec(dllimport)
#endif
#else
#define DKM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dkm_status {
  DKM_OK = 0,
  DKM_ERR_INVALID_ARGUMENT = 1,
  DKM_ERR_NUMERICAL = 2,
  DKM_ERR_FORMAT = 3,
  DKM_ERR_IO = 4,
  DKM_ERR_ESTIMATION = 5,
  DKM_ERR_UNDEFINED = 6,
  DKM_ERR_CONFIG = 7,
  DKM_ERR_INTERNAL = 99
} dkm_status;

typedef struct dkm_config dkm_config;
typedef struct dkm_image dkm_image;
typedef struct dkm_features dkm_features;
typedef struct dkm_warp dkm_warp;
typedef struct dkm_basis dkm_basis;

DKM_API const char* dkm_version(void);
/* Message of the last failure on the calling thread ("" if none). */
DKM_API const char* dkm_last_error(void);
DKM_API const char* dkm_status_string(dkm_status status);

/* Independent seed derived from a master seed and a stream name. */
DKM_API uint64_t dkm_substream_seed(uint64_t seed, const char* name);

DKM_API dkm_status dkm_set_threads(int n);
DKM_API int dkm_get_threads(void);

/* ---- pipeline configuration ------------------------------------------- */

DKM_API dkm_status dkm_config_create(dkm_config** out);
DKM_API void dkm_config_destroy(dkm_config* cfg);
DKM_API dkm_status dkm_config_set(dkm_config* cfg, const char* key, const char* value);
DKM_API dkm_status dkm_config_load_file(dkm_config* cfg, const char* path);
DKM_API dkm_status dkm_config_validate(const dkm_config* cfg);
/* Copies the "key = value" form into buf (NUL-terminated, truncated to cap).
 * *needed receives the full length including the terminator. */
DKM_API dkm_status dkm_config_to_text(const dkm_config* cfg, char* buf, size_t cap,
                                      size_t* needed);
/* Text form of one setting, same buffer contract as dkm_config_to_text. */
DKM_API dkm_status dkm_config_get(const dkm_config* cfg, const char* key, char* buf, size_t cap,
                                  size_t* needed);
DKM_API size_t dkm_config_key_count(void);
DKM_API const char* dkm_config_key(size_t index);

/* ---- images ------------------------------------------------------------ */

DKM_API dkm_status dkm_image_load(const char* path, dkm_image** out);
/* values: height*width*channels doubles, channels interleaved; clamped to
 * [0,1], non-finite values are rejected. */
DKM_API dkm_status dkm_image_create(size_t height, size_t width, size_t channels,
                                    const double* values, dkm_image** out);
DKM_API dkm_status dkm_image_texture(size_t height, size_t width, uint64_t seed,
                                     dkm_image** out);
DKM_API dkm_status dkm_image_save(const dkm_image* img, const char* path);
DKM_API dkm_status dkm_image_shape(const dkm_image* img, size_t* height, size_t* width,
                                   size_t* channels);
DKM_API void dkm_image_destroy(dkm_image* img);

/* ---- dense feature maps ------------------------------------------------ */

typedef struct dkm_feature_info {
  size_t height;
  size_t width;
  size_t channels;
  size_t stride;
  int normalized;
  size_t zero_cells;
  double min_norm; /* over non-zero cells */
  double max_norm;
} dkm_feature_info;

DKM_API dkm_status dkm_features_extract(const dkm_image* img, size_t stride,
                                        dkm_features** out);
DKM_API dkm_status dkm_features_load(const char* path, dkm_features** out);
DKM_API dkm_status dkm_features_save(const dkm_features* fm, const char* path);
DKM_API dkm_status dkm_features_info(const dkm_features* fm, dkm_feature_info* out);
DKM_API void dkm_features_destroy(dkm_features* fm);

/* ---- warp fields ------------------------------------------------------- */

DKM_API dkm_status dkm_warp_load(const char* path, dkm_warp** out);
DKM_API dkm_status dkm_warp_save(const dkm_warp* w, const char* path);
DKM_API dkm_status dkm_warp_identity(size_t height, size_t width, dkm_warp** out);
DKM_API dkm_status dkm_warp_shape(const dkm_warp* w, size_t* height, size_t* width);
/* xyc receives (flow x, flow y, confidence) of row-major point `index`. */
DKM_API dkm_status dkm_warp_get(const dkm_warp* w, size_t index, double xyc[3]);
DKM_API dkm_status dkm_warp_set(dkm_warp* w, size_t index, const double xyc[3]);
/* Writes the k most confident matches as "qx qy sx sy conf" lines. */
DKM_API dkm_status dkm_warp_write_topk(const dkm_warp* w, size_t k, const char* path);
DKM_API void dkm_warp_destroy(dkm_warp* w);

/* ---- embedding bases --------------------------------------------------- */

/* kind: "fourier", "se", "cossq" or "identity". */
DKM_API dkm_status dkm_basis_sample(const char* kind, size_t dimension, double ell,
                                    uint64_t seed, dkm_basis** out);
DKM_API dkm_status dkm_basis_save(const dkm_basis* b, const char* path);
DKM_API dkm_status dkm_basis_load(const char* path, dkm_basis** out);
DKM_API dkm_status dkm_basis_kernel(const dkm_basis* b, const double x[2], const double y[2],
                                    double* out);
/* Mean |empirical kernel - Gaussian limit| over random pairs in [-1,1]^2. */
DKM_API dkm_status dkm_basis_limit_deviation(const dkm_basis* b, size_t pairs, uint64_t seed,
                                             double* out);
DKM_API void dkm_basis_destroy(dkm_basis* b);

/* ---- matching ---------------------------------------------------------- */

typedef struct dkm_match_summary {
  double mean_confidence;
  double mean_modes;
  double multimodal_fraction;
  size_t degenerate;
  size_t least_squares_solves;
  double max_jitter;
  size_t stride;
  size_t warp_height;
  size_t warp_width;
} dkm_match_summary;

DKM_API dkm_status dkm_match_images(const dkm_image* query, const dkm_image* support,
                                    const dkm_config* cfg, dkm_warp** out,
                                    dkm_match_summary* summary);
DKM_API dkm_status dkm_match_features(const dkm_features* query, const dkm_features* support,
                                      const dkm_config* cfg, dkm_warp** out,
                                      dkm_match_summary* summary);

/* ---- metrics ----------------------------------------------------------- */

typedef struct dkm_metrics {
  size_t valid;
  double pck1;
  double pck3;
  double pck5;
  double aepe;
  double auc5;
  double auc10;
  double auc20;
} dkm_metrics;

/* Errors in support pixels (support_height x support_width) over reference
 * points with confidence > 0.5. pred is clipped to the image first; both
 * warps must share a grid. precision (may be NULL) receives one value per
 * threshold. */
DKM_API dkm_status dkm_metrics_compute(const dkm_warp* pred, const dkm_warp* ref,
                                       size_t support_height, size_t support_width,
                                       const double* thresholds, size_t n_thresholds,
                                       dkm_metrics* out, double* precision);

/* ---- toy regression ---------------------------------------------------- */

typedef struct dkm_toy_config {
  size_t n;
  double kernel_length;
  double weight_first;
  double weight_second;
  double noise_variance;
  double jitter;
  uint64_t seed;
} dkm_toy_config;

typedef struct dkm_toy_stats {
  double gp_transition_width;
  double attention_transition_width;
  double gp_rmse;        /* against y = x on [0, 0.35] */
  double attention_rmse;
  double nn_rmse;
} dkm_toy_stats;

DKM_API void dkm_toy_defaults(dkm_toy_config* cfg);
/* csv_path may be NULL. */
DKM_API dkm_status dkm_toy_run(const dkm_toy_config* cfg, const char* csv_path,
                               dkm_toy_stats* stats);

/* ---- synthetic benchmark ----------------------------------------------- */

typedef enum dkm_bench_pipeline {
  DKM_BENCH_MATCHER = 0,
  DKM_BENCH_ORACLE = 1,
  DKM_BENCH_IDENTITY = 2
} dkm_bench_pipeline;

typedef struct dkm_benchmark_config {
  size_t pairs;
  size_t image_size;
  double max_rotation_deg;
  double min_scale;
  double max_scale;
  double max_translation;
  double max_perspective;
  double noise_std;
  dkm_bench_pipeline pipeline;
  size_t topk;
  size_t ransac_iterations;
  double ransac_thresh_px;
  uint64_t seed;
} dkm_benchmark_config;

typedef struct dkm_benchmark_summary {
  size_t pairs;
  size_t failures;
  double mean_pck1, mean_pck3, mean_pck5, mean_aepe;
  double median_pck1, median_pck3, median_pck5, median_aepe;
  double median_homography_error_px;
} dkm_benchmark_summary;

DKM_API void dkm_benchmark_defaults(dkm_benchmark_config* cfg);
/* pipeline may be NULL for the default matcher settings. images may be
 * NULL (n_images 0) to use procedural textures. out_dir may be
 * NULL to skip writing pairs.csv and summary.txt. per_pair_pck5 (may be
 * NULL) receives cfg->pairs values, NaN for failed pairs. */
DKM_API dkm_status dkm_benchmark_run(const dkm_benchmark_config* cfg,
                                     const dkm_config* pipeline,
                                     const dkm_image* const* images, size_t n_images,
                                     const char* out_dir, dkm_benchmark_summary* out,
                                     double* per_pair_pck5);

#ifdef __cplusplus
}
#endif

#endif /* DKM_DKM_H_ */
