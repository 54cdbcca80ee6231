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

// Command-line front end. Uses only the C API in cwic/cwic.h.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cwic/cwic.h"

namespace {

int Fail(cwic_status status) {
  std::fprintf(stderr, "cwic: error: %s\n", cwic_last_error());
  return static_cast<int>(status);
}

struct ModelHandle {
  cwic_model* model = nullptr;
  ~ModelHandle() { cwic_model_free(model); }
};

void PrintLine(const char* line, void* user) {
  if (*static_cast<bool*>(user)) std::printf("%s\n", line);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned lossy image codec with content-weighted importance "
               "maps and a trimmed convolutional context model."};
  app.require_subcommand(1);

  std::string config_path, model_path, input, output, loss, planes = "on";
  std::vector<std::string> sets;
  int64_t seed = -1;
  bool auto_pad = false;
  bool verbose = false;
  int threads = 1;
  int jobs = 1;
  uint32_t count = 500;
  uint32_t size = 32;

  auto* train = app.add_subcommand("train", "train a model from a config file");
  train->add_option("--config", config_path, "key = value config file")
      ->required();
  train->add_option("--seed", seed, "override the config seed");
  train->add_option("--loss", loss, "distortion loss")
      ->check(CLI::IsMember({"mse", "msssim"}));
  train->add_option("--set", sets, "extra key=value overrides");
  train->add_flag("--verbose", verbose, "print the metrics row of every step");

  auto* encode = app.add_subcommand("encode", "compress a PPM image");
  encode->add_option("--model", model_path, "model file")->required();
  encode->add_option("input", input, "P6 PPM image")->required();
  encode->add_option("output", output, "output bitstream")->required();
  encode->add_flag("--auto-pad", auto_pad,
                   "replicate edges up to a multiple of 8");

  auto add_codec_flags = [&](CLI::App* cmd) {
    cmd->add_option("--parallel-planes", planes,
                    "decode one inclined plane per context-model pass")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--threads", threads,
                    "threads per context-model pass (0 = all cores)");
  };

  auto* decode = app.add_subcommand("decode", "decompress to a PPM image");
  decode->add_option("--model", model_path, "model file")->required();
  decode->add_option("input", input, "bitstream")->required();
  decode->add_option("output", output, "output PPM")->required();
  add_codec_flags(decode);

  auto* eval = app.add_subcommand("eval", "rate and distortion over a directory");
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("dir", input, "directory of PPM images")->required();
  eval->add_option("--out", output, "CSV path (default: stdout)");
  eval->add_option("--jobs", jobs, "images evaluated concurrently");
  eval->add_option("--loss", loss, "accepted for symmetry with train")
      ->check(CLI::IsMember({"mse", "msssim"}));
  add_codec_flags(eval);

  auto* inspect = app.add_subcommand("inspect", "describe a bitstream");
  inspect->add_option("input", input, "bitstream")->required();
  inspect->add_option("--model", model_path,
                      "model file, needed for the importance map");

  auto* synth = app.add_subcommand("synth", "write the synthetic toy corpus");
  synth->add_option("dir", output, "output directory")->required();
  synth->add_option("--count", count, "number of images");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--size", size, "image side (multiple of 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return CWIC_ERR_CONFIG;
  }

  cwic_codec_options codec;
  cwic_default_codec_options(&codec);
  codec.parallel_planes = planes == "on";
  codec.threads = threads;

  ModelHandle handle;
  if (!model_path.empty()) {
    const cwic_status s = cwic_model_load(model_path.c_str(), &handle.model);
    if (s != CWIC_OK) return Fail(s);
  }

  if (train->parsed()) {
    if (seed >= 0) sets.push_back("seed=" + std::to_string(seed));
    if (!loss.empty()) sets.push_back("loss=" + loss);
    std::vector<const char*> ptrs;
    for (const std::string& s : sets) ptrs.push_back(s.c_str());
    const cwic_status s = cwic_train(config_path.c_str(), ptrs.data(),
                                     ptrs.size(), PrintLine, &verbose);
    if (s != CWIC_OK) return Fail(s);
    std::printf("training finished\n");
    return 0;
  }

  if (encode->parsed()) {
    cwic_encode_stats stats{};
    const cwic_status s = cwic_encode_file(handle.model, input.c_str(),
                                           output.c_str(), auto_pad, &stats);
    if (s != CWIC_OK) return Fail(s);
    std::printf("image: %ux%u\nbytes: %llu\nmask_sum: %lld\nbpp: %.6f\n",
                stats.height, stats.width,
                static_cast<unsigned long long>(stats.bytes),
                static_cast<long long>(stats.mask_sum), stats.bpp);
    return 0;
  }

  if (decode->parsed()) {
    const cwic_status s = cwic_decode_file(handle.model, input.c_str(),
                                           output.c_str(), &codec);
    if (s != CWIC_OK) return Fail(s);
    return 0;
  }

  if (eval->parsed()) {
    char* csv = nullptr;
    const cwic_status s =
        cwic_eval_dir(handle.model, input.c_str(), &codec, jobs,
                      output.empty() ? nullptr : output.c_str(), &csv);
    if (s != CWIC_OK) return Fail(s);
    if (csv) {
      std::fputs(csv, stdout);
      cwic_buffer_free(csv);
    }
    return 0;
  }

  if (inspect->parsed()) {
    char* text = nullptr;
    const cwic_status s = cwic_inspect(input.c_str(), handle.model, &text);
    if (s != CWIC_OK) return Fail(s);
    std::fputs(text, stdout);
    cwic_buffer_free(text);
    return 0;
  }

  if (synth->parsed()) {
    const cwic_status s = cwic_make_toy_corpus(
        output.c_str(), count, seed < 0 ? 1 : static_cast<uint64_t>(seed),
        size);
    if (s != CWIC_OK) return Fail(s);
    std::printf("wrote %u images to %s\n", count, output.c_str());
    return 0;
  }
  return CWIC_ERR_CONFIG;
}
