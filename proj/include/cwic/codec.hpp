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

#ifndef CWIC_CODEC_HPP_
#define CWIC_CODEC_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cwic/container.hpp"
#include "cwic/entropy_model.hpp"
#include "cwic/model.hpp"
#include "cwic/tensor.hpp"

namespace cwic {

struct CodecOptions {
  // Inclined-order models: one context-model pass per plane instead of one
  // per symbol. Both modes decode identical symbols.
  bool parallel_planes = true;
  // Worker threads for each context-model pass.
  int threads = 1;
};

// Arithmetic-codes the symbols at positions where `coded` is set (empty:
// every position) in the model's coding order. Positions left out must hold
// symbol 0, which is what the decoder assumes for them.
std::vector<uint8_t> EncodeWithModel(const Tcae& model,
                                     const CodeCuboid& symbols,
                                     const BinaryCuboid& coded,
                                     int threads = 1);
CodeCuboid DecodeWithModel(const Tcae& model, std::span<const uint8_t> payload,
                           int height, int width, const BinaryCuboid& coded,
                           const CodecOptions& options = {});
// Code length in bits of the coded symbols under the 16-bit frequency
// tables the coder actually uses.
double QuantizedCrossEntropy(const Tcae& model, const CodeCuboid& symbols,
                             const BinaryCuboid& coded);

// What an encoder produces for one image (dims multiple of 8).
struct ImageCodes {
  CodeCuboid levels;        // o
  CodeCuboid importance;    // QI(p), 1 x h x w
  ImportanceMask mask;      // m
  CodeCuboid remapped;      // o'
  FeatureCuboid z;          // decoder input
};
ImageCodes AnalyzeImage(const ModelBundle& bundle, const ImagePlane& x);

// Codes QI(p) and then o' (mask-1 positions only) into a bitstream.
Bitstream EncodeCodes(const ModelBundle& bundle, const CodeCuboid& importance,
                      const CodeCuboid& remapped, int height, int width,
                      int threads = 1);

struct DecodedCodes {
  CodeCuboid importance;
  ImportanceMask mask;
  CodeCuboid remapped;
  FeatureCuboid z;
};
// Checks the stream against the model before decoding anything.
void CheckStreamMatchesModel(const BitstreamHeader& header,
                             const ModelBundle& bundle);
CodeCuboid DecodeImportance(const ModelBundle& bundle, const Bitstream& stream,
                            const CodecOptions& options = {});
DecodedCodes DecodeCodes(const ModelBundle& bundle, const Bitstream& stream,
                         const CodecOptions& options = {});

struct EncodeStats {
  int height = 0;
  int width = 0;
  size_t bytes = 0;
  size_t importance_bytes = 0;
  size_t code_bytes = 0;
  int64_t mask_sum = 0;
  double bpp = 0.0;  // file bits / (H W)
};

// Without `auto_pad`, dims must be multiples of 8. With it, the last row and
// column are replicated and the true dims go into the header.
std::vector<uint8_t> EncodeImage(const ModelBundle& bundle,
                                 const ImagePlane& image, bool auto_pad,
                                 int threads = 1, EncodeStats* stats = nullptr);
// Returns the reconstruction cropped to the true dims and clamped to [0, 1].
ImagePlane DecodeImage(const ModelBundle& bundle,
                       std::span<const uint8_t> bytes,
                       const CodecOptions& options = {},
                       DecodedCodes* codes = nullptr);

}  // namespace cwic

#endif  // CWIC_CODEC_HPP_
