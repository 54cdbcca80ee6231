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

#ifndef CWIC_CONTAINER_HPP_
#define CWIC_CONTAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cwic/digest.hpp"
#include "cwic/model.hpp"

namespace cwic {

constexpr uint32_t kBitstreamVersion = 1;
constexpr uint32_t kModelVersion = 1;
// magic + version + H + W + n + L + T + digest + two payload lengths.
constexpr size_t kHeaderBytes = 4 + 4 * 6 + 16 + 4 * 2;
// Largest accepted image side, in pixels.
constexpr uint32_t kMaxImageSide = 1u << 14;

struct BitstreamHeader {
  uint32_t version = kBitstreamVersion;
  uint32_t height = 0;  // true image dims; coded dims round up to 8
  uint32_t width = 0;
  uint32_t code_channels = 0;       // n
  uint32_t importance_levels = 0;   // L
  uint32_t quant_levels = 0;        // T
  ModelDigest model_id{};
  uint32_t importance_bytes = 0;
  uint32_t code_bytes = 0;

  bool operator==(const BitstreamHeader&) const = default;
};

struct Bitstream {
  BitstreamHeader header;
  std::vector<uint8_t> importance_payload;
  std::vector<uint8_t> code_payload;

  bool operator==(const Bitstream&) const = default;
};

// Fills in the payload lengths from the payloads.
std::vector<uint8_t> WriteBitstream(const Bitstream& stream);
// Throws a corrupt-data error on anything but a complete, well-formed
// stream.
Bitstream ReadBitstream(std::span<const uint8_t> bytes);
void ValidateHeader(const BitstreamHeader& header);

// Model file: magic, version, config block, parameter manifest, float32
// data blob, trailing 16-byte digest of everything before it.
std::vector<uint8_t> SaveModel(const ModelBundle& bundle);
ModelBundle LoadModel(std::span<const uint8_t> bytes);

std::vector<uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes);

void SaveModelFile(const ModelBundle& bundle, const std::string& path);
ModelBundle LoadModelFile(const std::string& path);

}  // namespace cwic

#endif  // CWIC_CONTAINER_HPP_
