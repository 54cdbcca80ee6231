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

#include "cwic/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <sstream>

#include "cwic/container.hpp"
#include "cwic/error.hpp"
#include "cwic/image_io.hpp"
#include "cwic/layers.hpp"

namespace cwic {

TrainResult RunTrainJob(const TrainJob& job,
                        const std::function<void(const std::string&)>& log) {
  const std::vector<std::string> files = ListPpmFiles(job.train_dir);
  if (files.empty()) IoError("no .ppm files in '" + job.train_dir + "'");
  std::vector<ImagePlane> corpus;
  corpus.reserve(files.size());
  for (const std::string& f : files) {
    corpus.push_back(ReadPpm(f));
    const ImagePlane& x = corpus.back();
    if (x.height() % kCodeStride != 0 || x.width() % kCodeStride != 0) {
      IoError(f + ": training images need dims divisible by 8, got " +
              std::to_string(x.height()) + "x" + std::to_string(x.width()));
    }
  }
  std::mt19937_64 rng(job.options.seed);
  ModelBundle bundle = ModelBundle::Random(job.model, rng);

  std::string csv = std::string(MetricsCsvHeader()) + "\n";
  auto on_step = [&](const StepMetrics& m) {
    const std::string row = MetricsCsvRow(m);
    csv += row + "\n";
    if (log) log(row);
  };
  TrainResult result = TrainModel(bundle, corpus, job.options, on_step);
  SaveModelFile(bundle, job.model_out);
  WriteFileBytes(job.metrics_out,
                 {reinterpret_cast<const uint8_t*>(csv.data()), csv.size()});
  return result;
}

std::vector<EvalRow> EvalDirectory(const ModelBundle& bundle,
                                   const std::string& dir,
                                   const EvalOptions& options) {
  const std::vector<std::string> files = ListPpmFiles(dir);
  std::vector<EvalRow> rows(files.size());
  std::vector<std::exception_ptr> errors(files.size());
  ParallelFor(static_cast<int>(files.size()), options.image_threads,
              [&](int begin, int end) {
                for (int n = begin; n < end; ++n) {
                  try {
                    const ImagePlane x = ReadPpm(files[n]);
                    EncodeStats stats;
                    const std::vector<uint8_t> bytes = EncodeImage(
                        bundle, x, true, options.codec.threads, &stats);
                    const ImagePlane y =
                        Quantize8(DecodeImage(bundle, bytes, options.codec));
                    EvalRow& row = rows[n];
                    row.image = std::filesystem::path(files[n]).filename();
                    row.height = x.height();
                    row.width = x.width();
                    row.bytes = bytes.size();
                    row.bpp = stats.bpp;
                    row.psnr = Psnr(y, x);
                    row.mask_sum = stats.mask_sum;
                    const int need = MsSsimMinSize(MsSsimOptions{}.scales);
                    if (x.height() >= need && x.width() >= need) {
                      row.ms_ssim = MsSsim(y, x);
                    }
                  } catch (...) {
                    errors[n] = std::current_exception();
                  }
                }
              });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

const char* EvalCsvHeader() {
  return "image,height,width,bytes,bpp,psnr,ms_ssim,mask_sum";
}

std::string EvalCsv(const std::vector<EvalRow>& rows) {
  std::ostringstream out;
  out << EvalCsvHeader() << "\n";
  char buf[128];
  double bpp = 0.0, psnr = 0.0, ssim = 0.0, mask = 0.0;
  size_t ssim_count = 0;
  for (const EvalRow& r : rows) {
    out << r.image << "," << r.height << "," << r.width << "," << r.bytes;
    std::snprintf(buf, sizeof(buf), ",%.6f,%.4f,", r.bpp, r.psnr);
    out << buf;
    if (r.ms_ssim) {
      std::snprintf(buf, sizeof(buf), "%.6f", *r.ms_ssim);
      out << buf;
      ssim += *r.ms_ssim;
      ++ssim_count;
    }
    out << "," << r.mask_sum << "\n";
    bpp += r.bpp;
    psnr += r.psnr;
    mask += static_cast<double>(r.mask_sum);
  }
  const double count = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  std::snprintf(buf, sizeof(buf), "mean,,,,%.6f,%.4f,", bpp / count,
                psnr / count);
  out << buf;
  if (ssim_count > 0) {
    std::snprintf(buf, sizeof(buf), "%.6f", ssim / ssim_count);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), ",%.3f\n", mask / count);
  out << buf;
  return out.str();
}

std::string InspectStream(std::span<const uint8_t> bytes,
                          const ModelBundle* bundle) {
  const Bitstream s = ReadBitstream(bytes);
  const BitstreamHeader& h = s.header;
  const int ch = (static_cast<int>(h.height) + kCodeStride - 1) / kCodeStride;
  const int cw = (static_cast<int>(h.width) + kCodeStride - 1) / kCodeStride;
  std::ostringstream out;
  out << "format_version: " << h.version << "\n"
      << "image: " << h.height << "x" << h.width << "\n"
      << "code_cuboid: " << h.code_channels << "x" << ch << "x" << cw << "\n"
      << "n: " << h.code_channels << "\n"
      << "L: " << h.importance_levels << "\n"
      << "T: " << h.quant_levels << "\n"
      << "model_id: " << DigestHex(h.model_id) << "\n"
      << "header_bytes: " << kHeaderBytes << "\n"
      << "importance_payload_bytes: " << h.importance_bytes << "\n"
      << "code_payload_bytes: " << h.code_bytes << "\n"
      << "total_bytes: " << bytes.size() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f",
                8.0 * bytes.size() / (double(h.height) * h.width));
  out << "bpp: " << buf << "\n";
  if (!bundle) {
    out << "importance: (pass --model to decode the importance map)\n";
    return out.str();
  }
  const CodeCuboid qi = DecodeImportance(*bundle, s);
  const int levels = static_cast<int>(h.importance_levels);
  std::vector<int64_t> hist(levels, 0);
  for (size_t n = 0; n < qi.size(); ++n) ++hist[qi[n]];
  const int64_t per_level = h.code_channels / h.importance_levels;
  int64_t mask_sum = 0;
  out << "importance_histogram:\n";
  for (int l = 0; l < levels; ++l) {
    out << "  level " << l << ": " << hist[l] << "\n";
    mask_sum += per_level * l * hist[l];
  }
  out << "mask_sum: " << mask_sum << "\n";
  out << "importance_map:\n";
  static const char kShades[] = " .:-=+*#%@";
  for (int i = 0; i < qi.height(); ++i) {
    out << "  ";
    for (int j = 0; j < qi.width(); ++j) {
      const int l = qi.at(0, i, j);
      out << (levels <= 10 ? static_cast<char>('0' + l)
                           : kShades[(l * 9) / (levels - 1)]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace cwic
