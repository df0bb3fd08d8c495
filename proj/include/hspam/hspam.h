/*
 * Copyright 2026 The hspam Authors
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

/*
 * C interface of libhspam: hierarchical superpixels built by object-constrained
 * two-phase region merging.
 *
 * Every object is an opaque handle owned by the caller and released with the
 * matching *_free function (NULL is accepted). Fallible calls return an
 * hspam_status; on failure the output pointer is left untouched and
 * hspam_last_error() describes the problem for the calling thread. Handles are
 * immutable after creation and may be shared between threads.
 */

#ifndef HSPAM_H
#define HSPAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HSPAM_BUILDING_LIBRARY)
#    define HSPAM_API __declspec(dllexport)
#  else
#    define HSPAM_API __declspec(dllimport)
#  endif
#else
#  define HSPAM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hspam_status {
  HSPAM_OK = 0,
  HSPAM_ERR_INVALID_ARGUMENT = 1,
  HSPAM_ERR_IO = 2,
  HSPAM_ERR_FORMAT = 3,
  HSPAM_ERR_DIMENSION_MISMATCH = 4,
  HSPAM_ERR_OUT_OF_RANGE = 5,
  HSPAM_ERR_DISCONNECTED = 6,
  HSPAM_ERR_INTERNAL = 7
} hspam_status;

typedef enum hspam_attention_mode {
  HSPAM_ATTENTION_OFF = 0,
  HSPAM_ATTENTION_SUPERPIXEL = 1,
  HSPAM_ATTENTION_OBJECT = 2
} hspam_attention_mode;

typedef struct hspam_image hspam_image;
typedef struct hspam_labels hspam_labels;
typedef struct hspam_features hspam_features;
typedef struct hspam_attention hspam_attention;
typedef struct hspam_sequence hspam_sequence;

/* Heap bytes returned by encoders; release with hspam_buffer_free. */
typedef struct hspam_buffer {
  uint8_t* data;
  size_t size;
} hspam_buffer;

typedef struct hspam_params {
  double w_pos;
  double w_att;
  hspam_attention_mode attention_mode;
  int attention_in_phase1;
  int attention_in_phase2;
} hspam_params;

typedef struct hspam_metrics {
  int k;
  double asa;
  double br;
  double cd;
  double src;
  double nestedness; /* valid when has_nestedness != 0 */
  int has_nestedness;
  int eps;
  int ground_truths;
} hspam_metrics;

HSPAM_API const char* hspam_version(void);
HSPAM_API const char* hspam_last_error(void);
HSPAM_API const char* hspam_status_string(hspam_status status);
HSPAM_API void hspam_buffer_free(hspam_buffer* buffer);

/* Images (PNG or binary PPM/PGM). */
HSPAM_API hspam_status hspam_image_load(const char* path, hspam_image** out);
HSPAM_API hspam_status hspam_image_decode(const uint8_t* data, size_t size,
                                          hspam_image** out);
HSPAM_API hspam_status hspam_image_save(const hspam_image* image, const char* path);
HSPAM_API hspam_status hspam_image_encode_png(const hspam_image* image,
                                              hspam_buffer* out);
HSPAM_API int hspam_image_width(const hspam_image* image);
HSPAM_API int hspam_image_height(const hspam_image* image);
HSPAM_API void hspam_image_free(hspam_image* image);

/* Label maps (16-bit single-channel PNG, labels contiguous from 0). */
HSPAM_API hspam_status hspam_labels_load(const char* path, hspam_labels** out);
/* Arbitrary non-negative ids; relabelled to 0..count-1 in ascending order. */
HSPAM_API hspam_status hspam_labels_from_array(int width, int height,
                                               const int32_t* labels,
                                               hspam_labels** out);
HSPAM_API hspam_status hspam_labels_grid(int width, int height, int n,
                                         hspam_labels** out);
HSPAM_API hspam_status hspam_labels_save(const hspam_labels* labels,
                                         const char* path);
HSPAM_API hspam_status hspam_labels_encode_png(const hspam_labels* labels,
                                               hspam_buffer* out);
HSPAM_API int hspam_labels_width(const hspam_labels* labels);
HSPAM_API int hspam_labels_height(const hspam_labels* labels);
HSPAM_API int hspam_labels_count(const hspam_labels* labels);
/* Copies width*height labels into `out`; OUT_OF_RANGE if capacity is short. */
HSPAM_API hspam_status hspam_labels_copy(const hspam_labels* labels,
                                         int32_t* out, size_t capacity);
HSPAM_API void hspam_labels_free(hspam_labels* labels);

/* Feature field: LAB + normalised position, plus optional HSPF deep planes
 * (deep_path may be NULL). */
HSPAM_API hspam_status hspam_features_assemble(const hspam_image* image,
                                               const char* deep_path,
                                               hspam_features** out);
HSPAM_API int hspam_features_channels(const hspam_features* features);
HSPAM_API void hspam_features_free(hspam_features* features);

/* Attention maps. Loading resamples bilinearly to width x height. */
HSPAM_API hspam_status hspam_attention_load(const char* path, int width,
                                            int height, hspam_attention** out);
/* Applies a JSON click array on top of `base` (may be NULL for zeros). */
HSPAM_API hspam_status hspam_attention_from_clicks(const char* clicks_json,
                                                   const hspam_attention* base,
                                                   int width, int height,
                                                   hspam_attention** out);
HSPAM_API hspam_status hspam_attention_encode_png(const hspam_attention* att,
                                                  hspam_buffer* out);
HSPAM_API void hspam_attention_free(hspam_attention* att);

/* Hierarchy. */
HSPAM_API hspam_params hspam_params_default(void);
/* `objects` NULL treats the image as a single object; `attention` may be NULL. */
HSPAM_API hspam_status hspam_build(const hspam_labels* fine,
                                   const hspam_labels* objects,
                                   const hspam_features* features,
                                   const hspam_attention* attention,
                                   const hspam_params* params,
                                   hspam_sequence** out);
HSPAM_API hspam_status hspam_sequence_load(const char* path, hspam_sequence** out);
HSPAM_API hspam_status hspam_sequence_parse(const char* json, hspam_sequence** out);
HSPAM_API hspam_status hspam_sequence_save(const hspam_sequence* seq,
                                           const char* path);
HSPAM_API hspam_status hspam_sequence_to_json(const hspam_sequence* seq,
                                              hspam_buffer* out);
HSPAM_API int hspam_sequence_n_f(const hspam_sequence* seq);
HSPAM_API int hspam_sequence_merge_count(const hspam_sequence* seq);
HSPAM_API int hspam_sequence_phase1_count(const hspam_sequence* seq);
HSPAM_API hspam_params hspam_sequence_params(const hspam_sequence* seq);
HSPAM_API void hspam_sequence_free(hspam_sequence* seq);

/* Partition with exactly k regions from the first n_f - k merges. */
HSPAM_API hspam_status hspam_extract(const hspam_sequence* seq,
                                     const hspam_labels* fine, int k,
                                     hspam_labels** out);

/* Metrics. asa/br are averaged over the ground truths; `coarser` (may be NULL)
 * enables nestedness. */
HSPAM_API hspam_status hspam_evaluate(const hspam_labels* labels,
                                      const hspam_labels* const* ground_truths,
                                      size_t ground_truth_count,
                                      const hspam_labels* coarser, int eps,
                                      hspam_metrics* out);
HSPAM_API hspam_status hspam_nestedness(const hspam_labels* fine,
                                        const hspam_labels* coarse,
                                        double* out);
HSPAM_API hspam_status hspam_render_overlay(const hspam_image* image,
                                            const hspam_labels* labels,
                                            uint8_t r, uint8_t g, uint8_t b,
                                            hspam_image** out);

#ifdef __cplusplus
}
#endif

#endif /* HSPAM_H */
