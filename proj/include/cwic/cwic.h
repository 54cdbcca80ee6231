// Copyright 2026 The CWIC Authors
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

#ifndef CWIC_CWIC_H_
#define CWIC_CWIC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CWIC_EXPORT __declspec(dllexport)
#else
#define CWIC_EXPORT __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  CWIC_OK = 0,
  CWIC_ERR_INTERNAL = 1,
  CWIC_ERR_IO = 2,
  CWIC_ERR_CONFIG = 3,
  CWIC_ERR_CORRUPT = 4,
  CWIC_ERR_NUMERIC = 5,
} cwic_status;

typedef struct cwic_model cwic_model;

typedef struct {
  uint32_t code_channels;      /* n */
  uint32_t importance_levels;  /* L */
  uint32_t quant_levels;       /* T */
  double rate;                 /* r */
  char digest_hex[33];
} cwic_model_info;

typedef struct {
  int parallel_planes; /* nonzero: one context-model pass per plane */
  int threads;         /* workers per pass; <= 0 selects all cores */
} cwic_codec_options;

typedef struct {
  uint32_t height;
  uint32_t width;
  uint64_t bytes;
  uint64_t importance_bytes;
  uint64_t code_bytes;
  int64_t mask_sum;
  double bpp;
} cwic_encode_stats;

/* Message of the last failed call on this thread ("" if none). */
CWIC_EXPORT const char* cwic_last_error(void);

CWIC_EXPORT void cwic_default_codec_options(cwic_codec_options* options);

CWIC_EXPORT cwic_status cwic_model_load(const char* path, cwic_model** out);
CWIC_EXPORT void cwic_model_free(cwic_model* model);
CWIC_EXPORT cwic_status cwic_model_get_info(const cwic_model* model,
                                            cwic_model_info* info);

/* Trains from a key = value config file. `overrides` holds `count`
 * "key=value" strings applied on top of the file. `log`, if non-null,
 * receives one metrics CSV row per step. */
CWIC_EXPORT cwic_status cwic_train(const char* config_path,
                                   const char* const* overrides, size_t count,
                                   void (*log)(const char* line, void* user),
                                   void* user);

/* Encodes interleaved 8-bit RGB. Without auto_pad, height and width must be
 * multiples of 8. The returned buffer is released with cwic_buffer_free. */
CWIC_EXPORT cwic_status cwic_encode_rgb(const cwic_model* model,
                                        const uint8_t* rgb, uint32_t height,
                                        uint32_t width, int auto_pad,
                                        uint8_t** out, size_t* out_len,
                                        cwic_encode_stats* stats);
/* Decodes into interleaved 8-bit RGB (released with cwic_buffer_free). */
CWIC_EXPORT cwic_status cwic_decode_rgb(const cwic_model* model,
                                        const uint8_t* stream, size_t len,
                                        const cwic_codec_options* options,
                                        uint8_t** rgb, uint32_t* height,
                                        uint32_t* width);
CWIC_EXPORT void cwic_buffer_free(void* buffer);

CWIC_EXPORT cwic_status cwic_encode_file(const cwic_model* model,
                                         const char* ppm_path,
                                         const char* out_path, int auto_pad,
                                         cwic_encode_stats* stats);
CWIC_EXPORT cwic_status cwic_decode_file(const cwic_model* model,
                                         const char* stream_path,
                                         const char* ppm_path,
                                         const cwic_codec_options* options);

/* Writes the evaluation CSV for every PPM in `dir` to `csv_path`, or returns
 * it in *csv (release with cwic_buffer_free) when csv_path is null. */
CWIC_EXPORT cwic_status cwic_eval_dir(const cwic_model* model,
                                      const char* dir,
                                      const cwic_codec_options* options,
                                      int image_threads, const char* csv_path,
                                      char** csv);

/* Human-readable dump of a stream; `model` may be null. */
CWIC_EXPORT cwic_status cwic_inspect(const char* stream_path,
                                     const cwic_model* model, char** text);

/* Writes `count` synthetic toy images (size x size) into `dir`. */
CWIC_EXPORT cwic_status cwic_make_toy_corpus(const char* dir, uint32_t count,
                                             uint64_t seed, uint32_t size);

#ifdef __cplusplus
}
#endif

#endif /* CWIC_CWIC_H_ */
