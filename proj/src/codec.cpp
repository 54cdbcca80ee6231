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

#include "cwic/codec.hpp"

#include <algorithm>

#include "cwic/arith_coder.hpp"
#include "cwic/error.hpp"
#include "cwic/image_io.hpp"
#include "cwic/importance.hpp"
#include "cwic/quantizer.hpp"

namespace cwic {

namespace {

void CheckCodedShape(const Tcae& model, const CodeCuboid& symbols,
                     const BinaryCuboid& coded) {
  if (symbols.channels() != model.config().channels) {
    ConfigError("context model expects " +
                std::to_string(model.config().channels) +
                " channels, cuboid is " + ShapeString(symbols));
  }
  if (!coded.empty() && !coded.same_shape(symbols)) {
    ConfigError("coded-position mask " + ShapeString(coded) +
                " does not match cuboid " + ShapeString(symbols));
  }
}

bool IsCoded(const BinaryCuboid& coded, const Position& p) {
  return coded.empty() || coded.at(p.k, p.i, p.j);
}

}  // namespace

std::vector<uint8_t> EncodeWithModel(const Tcae& model,
                                     const CodeCuboid& symbols,
                                     const BinaryCuboid& coded, int threads) {
  CheckCodedShape(model, symbols, coded);
  for (size_t n = 0; n < symbols.size(); ++n) {
    if (!coded.empty() && !coded[n] && symbols[n] != 0) {
      ConfigError("uncoded positions must hold symbol 0");
    }
  }
  // By causality one pass over the complete cuboid gives every position the
  // same distribution the decoder will see.
  const PmfCuboid pmfs = model.Predict(symbols, threads);
  ArithEncoder enc;
  for (const auto& step : CodingSteps(model.config().order, symbols.channels(),
                                      symbols.height(), symbols.width())) {
    for (const Position& p : step) {
      if (!IsCoded(coded, p)) continue;
      enc.Encode(symbols.at(p.k, p.i, p.j), QuantizePmf(pmfs.at(p.k, p.i, p.j)));
    }
  }
  return enc.Finish();
}

CodeCuboid DecodeWithModel(const Tcae& model, std::span<const uint8_t> payload,
                           int height, int width, const BinaryCuboid& coded,
                           const CodecOptions& options) {
  const int n = model.config().channels;
  CodeCuboid symbols(n, height, width, 0);
  CheckCodedShape(model, symbols, coded);
  ArithDecoder dec(payload);
  const bool per_plane =
      options.parallel_planes && model.config().order == CodingOrder::kInclined;
  for (const auto& step :
       CodingSteps(model.config().order, n, height, width)) {
    if (per_plane) {
      bool any = false;
      for (const Position& p : step) any = any || IsCoded(coded, p);
      if (!any) continue;
      const PmfCuboid pmfs = model.Predict(symbols, options.threads);
      for (const Position& p : step) {
        if (!IsCoded(coded, p)) continue;
        symbols.at(p.k, p.i, p.j) =
            dec.Decode(QuantizePmf(pmfs.at(p.k, p.i, p.j)));
      }
    } else {
      for (const Position& p : step) {
        if (!IsCoded(coded, p)) continue;
        const PmfCuboid pmfs = model.Predict(symbols, options.threads);
        symbols.at(p.k, p.i, p.j) =
            dec.Decode(QuantizePmf(pmfs.at(p.k, p.i, p.j)));
      }
    }
  }
  return symbols;
}

double QuantizedCrossEntropy(const Tcae& model, const CodeCuboid& symbols,
                             const BinaryCuboid& coded) {
  CheckCodedShape(model, symbols, coded);
  const PmfCuboid pmfs = model.Predict(symbols);
  double bits = 0.0;
  for (const Position& p :
       RasterOrder(symbols.channels(), symbols.height(), symbols.width())) {
    if (!IsCoded(coded, p)) continue;
    bits += SymbolBits(QuantizePmf(pmfs.at(p.k, p.i, p.j)),
                       symbols.at(p.k, p.i, p.j));
  }
  return bits;
}

ImageCodes AnalyzeImage(const ModelBundle& bundle, const ImagePlane& x) {
  const EncoderOutput enc = EncoderForward(bundle.nets, x);
  const FeatureCuboid p = ImportanceForward(bundle.nets, enc.shared);
  ImageCodes codes;
  codes.levels = Quantize(enc.features, bundle.quantizer).levels;
  codes.importance = QuantizeImportance(p, bundle.config.importance.levels);
  codes.mask = BuildMask(codes.importance, bundle.config.network.code_channels,
                         bundle.config.importance.levels);
  codes.remapped = RemapCodes(codes.levels, codes.mask);
  codes.z = Dequantize(codes.levels, codes.mask, bundle.quantizer);
  return codes;
}

Bitstream EncodeCodes(const ModelBundle& bundle, const CodeCuboid& importance,
                      const CodeCuboid& remapped, int height, int width,
                      int threads) {
  const ModelConfig& c = bundle.config;
  const int h = (height + kCodeStride - 1) / kCodeStride;
  const int w = (width + kCodeStride - 1) / kCodeStride;
  if (importance.channels() != 1 || importance.height() != h ||
      importance.width() != w) {
    ConfigError("importance map " + ShapeString(importance) +
                " does not fit a " + std::to_string(height) + "x" +
                std::to_string(width) + " image");
  }
  const ImportanceMask mask =
      BuildMask(importance, c.network.code_channels, c.importance.levels);
  if (!remapped.same_shape(mask)) {
    ConfigError("code cuboid " + ShapeString(remapped) +
                " does not match the mask " + ShapeString(mask));
  }
  for (size_t n = 0; n < remapped.size(); ++n) {
    const bool ok = mask[n] ? (remapped[n] >= 1 && remapped[n] <= c.quant_levels)
                            : remapped[n] == 0;
    if (!ok) ConfigError("remapped codes inconsistent with the mask");
  }
  Bitstream s;
  s.header.height = static_cast<uint32_t>(height);
  s.header.width = static_cast<uint32_t>(width);
  s.header.code_channels = static_cast<uint32_t>(c.network.code_channels);
  s.header.importance_levels = static_cast<uint32_t>(c.importance.levels);
  s.header.quant_levels = static_cast<uint32_t>(c.quant_levels);
  s.header.model_id = bundle.digest;
  s.importance_payload =
      EncodeWithModel(bundle.importance_model, importance, {}, threads);
  s.code_payload = EncodeWithModel(bundle.code_model, remapped, mask, threads);
  s.header.importance_bytes = static_cast<uint32_t>(s.importance_payload.size());
  s.header.code_bytes = static_cast<uint32_t>(s.code_payload.size());
  return s;
}

void CheckStreamMatchesModel(const BitstreamHeader& h,
                             const ModelBundle& bundle) {
  const ModelConfig& c = bundle.config;
  if (h.model_id != bundle.digest) {
    ConfigError("stream was encoded with model " + DigestHex(h.model_id) +
                ", not the supplied model " + DigestHex(bundle.digest));
  }
  if (h.code_channels != static_cast<uint32_t>(c.network.code_channels) ||
      h.importance_levels != static_cast<uint32_t>(c.importance.levels) ||
      h.quant_levels != static_cast<uint32_t>(c.quant_levels)) {
    CorruptData("stream n/L/T do not match its model");
  }
}

CodeCuboid DecodeImportance(const ModelBundle& bundle, const Bitstream& stream,
                            const CodecOptions& options) {
  CheckStreamMatchesModel(stream.header, bundle);
  const int h = (static_cast<int>(stream.header.height) + kCodeStride - 1) /
                kCodeStride;
  const int w = (static_cast<int>(stream.header.width) + kCodeStride - 1) /
                kCodeStride;
  return DecodeWithModel(bundle.importance_model, stream.importance_payload, h,
                         w, {}, options);
}

DecodedCodes DecodeCodes(const ModelBundle& bundle, const Bitstream& stream,
                         const CodecOptions& options) {
  DecodedCodes out;
  out.importance = DecodeImportance(bundle, stream, options);
  const ModelConfig& c = bundle.config;
  out.mask = BuildMask(out.importance, c.network.code_channels,
                       c.importance.levels);
  out.remapped =
      DecodeWithModel(bundle.code_model, stream.code_payload,
                      out.importance.height(), out.importance.width(), out.mask,
                      options);
  for (size_t n = 0; n < out.remapped.size(); ++n) {
    if (out.mask[n] && out.remapped[n] == 0) {
      CorruptData("code stream holds an empty symbol at a masked-in position");
    }
  }
  out.z = Dequantize(UnmapCodes(out.remapped), out.mask, bundle.quantizer);
  return out;
}

std::vector<uint8_t> EncodeImage(const ModelBundle& bundle,
                                 const ImagePlane& image, bool auto_pad,
                                 int threads, EncodeStats* stats) {
  if (image.channels() != 3) {
    ConfigError("expected a 3-channel image, got " + ShapeString(image));
  }
  const int height = image.height();
  const int width = image.width();
  const bool aligned = height % kCodeStride == 0 && width % kCodeStride == 0;
  if (!aligned && !auto_pad) CheckImageDims(height, width);
  const ImagePlane x = aligned ? image : PadToMultiple(image, kCodeStride);
  const ImageCodes codes = AnalyzeImage(bundle, x);
  const Bitstream stream =
      EncodeCodes(bundle, codes.importance, codes.remapped, height, width,
                  threads);
  std::vector<uint8_t> bytes = WriteBitstream(stream);
  if (stats) {
    stats->height = height;
    stats->width = width;
    stats->bytes = bytes.size();
    stats->importance_bytes = stream.importance_payload.size();
    stats->code_bytes = stream.code_payload.size();
    stats->mask_sum = MaskSum(codes.mask);
    stats->bpp = 8.0 * static_cast<double>(bytes.size()) / (double(height) * width);
  }
  return bytes;
}

ImagePlane DecodeImage(const ModelBundle& bundle,
                       std::span<const uint8_t> bytes,
                       const CodecOptions& options, DecodedCodes* codes) {
  const Bitstream stream = ReadBitstream(bytes);
  DecodedCodes decoded = DecodeCodes(bundle, stream, options);
  ImagePlane x = DecoderForward(bundle.nets, decoded.z);
  x = Crop(x, static_cast<int>(stream.header.height),
           static_cast<int>(stream.header.width));
  for (size_t n = 0; n < x.size(); ++n) x[n] = std::clamp(x[n], 0.0, 1.0);
  if (codes) *codes = std::move(decoded);
  return x;
}

}  // namespace cwic
