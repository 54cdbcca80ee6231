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

#include "cwic/cwic.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "cwic/codec.hpp"
#include "cwic/container.hpp"
#include "cwic/error.hpp"
#include "cwic/image_io.hpp"
#include "cwic/pipeline.hpp"
#include "cwic/run_config.hpp"
#include "cwic/toy_corpus.hpp"

struct cwic_model {
  cwic::ModelBundle bundle;
};

namespace {

thread_local std::string g_last_error;

cwic_status StatusOf(cwic::ErrorKind kind) {
  switch (kind) {
    case cwic::ErrorKind::kIo:
      return CWIC_ERR_IO;
    case cwic::ErrorKind::kConfig:
      return CWIC_ERR_CONFIG;
    case cwic::ErrorKind::kCorruptData:
      return CWIC_ERR_CORRUPT;
    case cwic::ErrorKind::kNumeric:
      return CWIC_ERR_NUMERIC;
    case cwic::ErrorKind::kInternal:
      break;
  }
  return CWIC_ERR_INTERNAL;
}

template <typename F>
cwic_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CWIC_OK;
  } catch (const cwic::Error& e) {
    g_last_error = e.what();
    return StatusOf(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return CWIC_ERR_INTERNAL;
}

void NeedArg(const void* p, const char* name) {
  if (!p) cwic::ConfigError(std::string("argument '") + name + "' is null");
}

template <typename T>
T* CopyOut(const T* data, size_t count) {
  T* out = static_cast<T*>(std::malloc(count == 0 ? 1 : count * sizeof(T)));
  if (!out) throw std::bad_alloc();
  if (count) std::memcpy(out, data, count * sizeof(T));
  return out;
}

char* CopyString(const std::string& s) {
  char* out = CopyOut(s.c_str(), s.size() + 1);
  return out;
}

cwic::CodecOptions ToCodec(const cwic_codec_options* o) {
  cwic::CodecOptions c;
  if (o) {
    c.parallel_planes = o->parallel_planes != 0;
    c.threads = o->threads;
  }
  return c;
}

void FillStats(const cwic::EncodeStats& s, cwic_encode_stats* out) {
  if (!out) return;
  out->height = static_cast<uint32_t>(s.height);
  out->width = static_cast<uint32_t>(s.width);
  out->bytes = s.bytes;
  out->importance_bytes = s.importance_bytes;
  out->code_bytes = s.code_bytes;
  out->mask_sum = s.mask_sum;
  out->bpp = s.bpp;
}

}  // namespace

extern "C" {

const char* cwic_last_error(void) { return g_last_error.c_str(); }

void cwic_default_codec_options(cwic_codec_options* options) {
  if (!options) return;
  options->parallel_planes = 1;
  options->threads = 1;
}

cwic_status cwic_model_load(const char* path, cwic_model** out) {
  return Guard([&] {
    NeedArg(path, "path");
    NeedArg(out, "out");
    *out = nullptr;
    auto* m = new cwic_model{cwic::LoadModelFile(path)};
    *out = m;
  });
}

void cwic_model_free(cwic_model* model) { delete model; }

cwic_status cwic_model_get_info(const cwic_model* model,
                                cwic_model_info* info) {
  return Guard([&] {
    NeedArg(model, "model");
    NeedArg(info, "info");
    const cwic::ModelConfig& c = model->bundle.config;
    info->code_channels = static_cast<uint32_t>(c.network.code_channels);
    info->importance_levels = static_cast<uint32_t>(c.importance.levels);
    info->quant_levels = static_cast<uint32_t>(c.quant_levels);
    info->rate = c.importance.rate;
    const std::string hex = cwic::DigestHex(model->bundle.digest);
    std::memcpy(info->digest_hex, hex.c_str(), hex.size() + 1);
  });
}

cwic_status cwic_train(const char* config_path, const char* const* overrides,
                       size_t count, void (*log)(const char*, void*),
                       void* user) {
  return Guard([&] {
    NeedArg(config_path, "config_path");
    cwic::RunConfig cfg = cwic::RunConfig::Load(config_path);
    std::vector<std::string> extra;
    for (size_t n = 0; n < count; ++n) {
      NeedArg(overrides[n], "overrides[]");
      extra.emplace_back(overrides[n]);
    }
    cfg.Override(extra);
    const cwic::TrainJob job = cwic::MakeTrainJob(cfg);
    std::function<void(const std::string&)> sink;
    if (log) sink = [&](const std::string& line) { log(line.c_str(), user); };
    cwic::RunTrainJob(job, sink);
  });
}

cwic_status cwic_encode_rgb(const cwic_model* model, const uint8_t* rgb,
                            uint32_t height, uint32_t width, int auto_pad,
                            uint8_t** out, size_t* out_len,
                            cwic_encode_stats* stats) {
  return Guard([&] {
    NeedArg(model, "model");
    NeedArg(rgb, "rgb");
    NeedArg(out, "out");
    NeedArg(out_len, "out_len");
    if (height == 0 || width == 0 || height > cwic::kMaxImageSide ||
        width > cwic::kMaxImageSide) {
      cwic::ConfigError("image dims out of range");
    }
    const size_t size = size_t{height} * width * 3;
    const cwic::ImagePlane x = cwic::FromRgb8(
        {rgb, size}, static_cast<int>(height), static_cast<int>(width));
    cwic::EncodeStats s;
    const std::vector<uint8_t> bytes =
        cwic::EncodeImage(model->bundle, x, auto_pad != 0, 1, &s);
    *out = CopyOut(bytes.data(), bytes.size());
    *out_len = bytes.size();
    FillStats(s, stats);
  });
}

cwic_status cwic_decode_rgb(const cwic_model* model, const uint8_t* stream,
                            size_t len, const cwic_codec_options* options,
                            uint8_t** rgb, uint32_t* height, uint32_t* width) {
  return Guard([&] {
    NeedArg(model, "model");
    NeedArg(stream, "stream");
    NeedArg(rgb, "rgb");
    NeedArg(height, "height");
    NeedArg(width, "width");
    const cwic::ImagePlane y =
        cwic::DecodeImage(model->bundle, {stream, len}, ToCodec(options));
    const std::vector<uint8_t> pixels = cwic::ToRgb8(y);
    *rgb = CopyOut(pixels.data(), pixels.size());
    *height = static_cast<uint32_t>(y.height());
    *width = static_cast<uint32_t>(y.width());
  });
}

void cwic_buffer_free(void* buffer) { std::free(buffer); }

cwic_status cwic_encode_file(const cwic_model* model, const char* ppm_path,
                             const char* out_path, int auto_pad,
                             cwic_encode_stats* stats) {
  return Guard([&] {
    NeedArg(model, "model");
    NeedArg(ppm_path, "ppm_path");
    NeedArg(out_path, "out_path");
    const cwic::ImagePlane x = cwic::ReadPpm(ppm_path);
    cwic::EncodeStats s;
    const std::vector<uint8_t> bytes =
        cwic::EncodeImage(model->bundle, x, auto_pad != 0, 1, &s);
    cwic::WriteFileBytes(out_path, bytes);
    FillStats(s, stats);
  });
}

cwic_status cwic_decode_file(const cwic_model* model, const char* stream_path,
                             const char* ppm_path,
                             const cwic_codec_options* options) {
  return Guard([&] {
    NeedArg(model, "model");
    NeedArg(stream_path, "stream_path");
    NeedArg(ppm_path, "ppm_path");
    const std::vector<uint8_t> bytes = cwic::ReadFileBytes(stream_path);
    const cwic::ImagePlane y =
        cwic::DecodeImage(model->bundle, bytes, ToCodec(options));
    cwic::WritePpm(ppm_path, y);
  });
}

cwic_status cwic_eval_dir(const cwic_model* model, const char* dir,
                          const cwic_codec_options* options, int image_threads,
                          const char* csv_path, char** csv) {
  return Guard([&] {
    NeedArg(model, "model");
    NeedArg(dir, "dir");
    if (!csv_path) NeedArg(csv, "csv");
    cwic::EvalOptions eo;
    eo.codec = ToCodec(options);
    eo.image_threads = image_threads;
    const std::string text =
        cwic::EvalCsv(cwic::EvalDirectory(model->bundle, dir, eo));
    if (csv_path) {
      cwic::WriteFileBytes(
          csv_path, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
    } else {
      *csv = CopyString(text);
    }
  });
}

cwic_status cwic_inspect(const char* stream_path, const cwic_model* model,
                         char** text) {
  return Guard([&] {
    NeedArg(stream_path, "stream_path");
    NeedArg(text, "text");
    const std::vector<uint8_t> bytes = cwic::ReadFileBytes(stream_path);
    *text = CopyString(
        cwic::InspectStream(bytes, model ? &model->bundle : nullptr));
  });
}

cwic_status cwic_make_toy_corpus(const char* dir, uint32_t count,
                                 uint64_t seed, uint32_t size) {
  return Guard([&] {
    NeedArg(dir, "dir");
    if (count > 1000000 || size > 4096) {
      cwic::ConfigError("toy corpus count or size too large");
    }
    cwic::WriteToyCorpus(dir, static_cast<int>(count), seed,
                         static_cast<int>(size));
  });
}

}  // extern "C"
