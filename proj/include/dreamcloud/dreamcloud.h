// Copyright 2026 The DreamCloud Authors.
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

/* C interface to the dreamcloud library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a dc_status; on
 * failure dc_last_error() describes the problem (thread-local, valid until
 * the next failing call on the same thread). Strings returned through char**
 * are released with dc_string_free.
 */
#ifndef DREAMCLOUD_DREAMCLOUD_H_
#define DREAMCLOUD_DREAMCLOUD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DC_API __declspec(dllexport)
#else
#define DC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum dc_status {
  DC_OK = 0,
  DC_ERR_USAGE = 1,
  DC_ERR_IO = 2,
  DC_ERR_NUMERIC = 3
} dc_status;

typedef struct dc_cloud dc_cloud;
typedef struct dc_mesh dc_mesh;
typedef struct dc_model dc_model;
typedef struct dc_segmentation dc_segmentation;

DC_API const char* dc_version(void);
DC_API const char* dc_last_error(void);
DC_API void dc_string_free(char* s);

/* Point clouds. Coordinates are interleaved x, y, z doubles. */
DC_API dc_status dc_cloud_create(const double* xyz, size_t count,
                                 dc_cloud** out);
DC_API void dc_cloud_free(dc_cloud* cloud);
DC_API size_t dc_cloud_size(const dc_cloud* cloud);
DC_API const double* dc_cloud_data(const dc_cloud* cloud);
DC_API dc_status dc_cloud_union(const dc_cloud* a, const dc_cloud* b,
                                dc_cloud** out);
/* format: "off", "ply", "xyz" or NULL to use the file extension. */
DC_API dc_status dc_cloud_read(const char* path, const char* format,
                               dc_cloud** out);
DC_API dc_status dc_cloud_write(const dc_cloud* cloud, const char* path,
                                const char* format);
/* method: "random" or "blue-noise". */
DC_API dc_status dc_cloud_downsample(const dc_cloud* cloud, size_t count,
                                     const char* method, uint64_t seed,
                                     dc_cloud** out);
DC_API dc_status dc_cloud_sparsity(const dc_cloud* cloud, size_t k,
                                   double* mean_knn, double* max_knn);

/* Meshes (OFF or PLY with faces). */
DC_API dc_status dc_mesh_read(const char* path, dc_mesh** out);
DC_API void dc_mesh_free(dc_mesh* mesh);
DC_API size_t dc_mesh_face_count(const dc_mesh* mesh);
DC_API dc_status dc_mesh_sample(const dc_mesh* mesh, size_t count,
                                uint64_t seed, dc_cloud** out);

/* Synthetic dataset written as XYZ files plus manifest.json. */
DC_API dc_status dc_dataset_write(const char* dir, size_t per_class,
                                  size_t capacity, uint64_t seed);

/* Models. */
DC_API dc_status dc_model_load(const char* path, dc_model** out);
DC_API dc_status dc_model_save(const dc_model* model, const char* path);
DC_API void dc_model_free(dc_model* model);
DC_API size_t dc_model_capacity(const dc_model* model);
DC_API size_t dc_model_class_count(const dc_model* model);
DC_API const char* dc_model_class_name(const dc_model* model, size_t index);
/* Trains a fresh model on a dataset directory. config_json holds TrainConfig
 * keys plus optional "heldout_fraction" (may be NULL). metrics_json may be
 * NULL. */
DC_API dc_status dc_model_train(const char* dataset_dir,
                                const char* config_json, dc_model** out,
                                char** metrics_json);
/* Standardizes the cloud and fits it to capacity (seeded) before the forward
 * pass. logits must hold dc_model_class_count entries. */
DC_API dc_status dc_model_classify(const dc_model* model,
                                   const dc_cloud* cloud, uint64_t seed,
                                   double* logits, size_t* label);

/* Dreams over the union of `inputs` according to a JSON run config. */
DC_API dc_status dc_dream(const dc_model* model, const dc_cloud* const* inputs,
                          size_t input_count, const char* config_json,
                          dc_cloud** out, char** report_json);

/* Segmentation from a JSON method spec (see run_config.hpp). */
DC_API dc_status dc_segment(const dc_cloud* cloud, const char* spec_json,
                            dc_segmentation** out);
DC_API void dc_segmentation_free(dc_segmentation* seg);
DC_API size_t dc_segmentation_count(const dc_segmentation* seg);
DC_API const size_t* dc_segmentation_assignment(const dc_segmentation* seg);
DC_API dc_status dc_segmentation_extract(const dc_segmentation* seg,
                                         const dc_cloud* cloud, size_t index,
                                         dc_cloud** out);
/* PLY with each vertex colored by its segment from a fixed 18-color palette
 * (index modulo 18). */
DC_API dc_status dc_segmentation_write_preview(const dc_segmentation* seg,
                                               const dc_cloud* cloud,
                                               const char* path);

#ifdef __cplusplus
}
#endif

#endif /* DREAMCLOUD_DREAMCLOUD_H_ */
