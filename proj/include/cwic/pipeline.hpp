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

#ifndef CWIC_PIPELINE_HPP_
#define CWIC_PIPELINE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cwic/codec.hpp"
#include "cwic/model.hpp"
#include "cwic/run_config.hpp"
#include "cwic/trainer.hpp"

namespace cwic {

// Reads the corpus, trains from a seeded random init, writes the model file
// and the metrics CSV. `log` receives one line per finished step.
TrainResult RunTrainJob(const TrainJob& job,
                        const std::function<void(const std::string&)>& log = {});

struct EvalRow {
  std::string image;
  int height = 0;
  int width = 0;
  size_t bytes = 0;
  double bpp = 0.0;
  double psnr = 0.0;
  std::optional<double> ms_ssim;  // absent when the image is too small
  int64_t mask_sum = 0;
};

struct EvalOptions {
  CodecOptions codec;
  // Images evaluated concurrently; results do not depend on it.
  int image_threads = 1;
};

// Encodes, decodes and scores every PPM in `dir` in sorted order. PSNR and
// MS-SSIM compare the 8-bit input with the 8-bit decoded output.
std::vector<EvalRow> EvalDirectory(const ModelBundle& bundle,
                                   const std::string& dir,
                                   const EvalOptions& options = {});
// One row per image plus a final "mean" row.
std::string EvalCsv(const std::vector<EvalRow>& rows);
const char* EvalCsvHeader();

// Header fields and payload sizes; with a model, also the decoded importance
// levels as a histogram and an ASCII map.
std::string InspectStream(std::span<const uint8_t> bytes,
                          const ModelBundle* bundle);

}  // namespace cwic

#endif  // CWIC_PIPELINE_HPP_
