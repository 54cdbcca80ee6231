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

#include "cwic/container.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "cwic/error.hpp"

namespace cwic {

namespace {

constexpr char kStreamMagic[4] = {'C', 'W', 'I', 'C'};
constexpr char kModelMagic[4] = {'C', 'W', 'M', 'D'};

class ByteWriter {
 public:
  void U32(uint32_t v) {
    for (int b = 0; b < 4; ++b) out_.push_back(static_cast<uint8_t>(v >> (8 * b)));
  }
  void U64(uint64_t v) {
    for (int b = 0; b < 8; ++b) out_.push_back(static_cast<uint8_t>(v >> (8 * b)));
  }
  void F64(double v) { U64(std::bit_cast<uint64_t>(v)); }
  void F32(float v) { U32(std::bit_cast<uint32_t>(v)); }
  void Bytes(std::span<const uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }
  void Str(const std::string& s) {
    U32(static_cast<uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  std::vector<uint8_t>& bytes() { return out_; }

 private:
  std::vector<uint8_t> out_;
};

class ByteReader {
 public:
  ByteReader(std::span<const uint8_t> bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= uint32_t{bytes_[pos_++]} << (8 * b);
    return v;
  }
  uint64_t U64() {
    const uint64_t lo = U32();
    const uint64_t hi = U32();
    return lo | (hi << 32);
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::span<const uint8_t> Bytes(size_t count) {
    Need(count);
    auto s = bytes_.subspan(pos_, count);
    pos_ += count;
    return s;
  }
  std::string Str(size_t max_len) {
    const uint32_t len = U32();
    if (len > max_len) CorruptData(std::string(what_) + ": string too long");
    auto s = Bytes(len);
    return std::string(s.begin(), s.end());
  }
  // Reads a count and checks it against [lo, hi].
  uint32_t Count(uint32_t lo, uint32_t hi, const char* field) {
    const uint32_t v = U32();
    if (v < lo || v > hi) {
      CorruptData(std::string(what_) + ": field " + field + " = " +
                  std::to_string(v) + " outside [" + std::to_string(lo) +
                  ", " + std::to_string(hi) + "]");
    }
    return v;
  }
  size_t remaining() const { return bytes_.size() - pos_; }
  size_t pos() const { return pos_; }

 private:
  void Need(size_t count) {
    if (remaining() < count) {
      CorruptData(std::string(what_) + " truncated at byte " +
                  std::to_string(bytes_.size()));
    }
  }

  std::span<const uint8_t> bytes_;
  const char* what_;
  size_t pos_ = 0;
};

}  // namespace

void ValidateHeader(const BitstreamHeader& h) {
  if (h.version != kBitstreamVersion) {
    CorruptData("unsupported version " + std::to_string(h.version) +
                " (expected " + std::to_string(kBitstreamVersion) + ")");
  }
  if (h.height < 1 || h.height > kMaxImageSide || h.width < 1 ||
      h.width > kMaxImageSide) {
    CorruptData("image dims " + std::to_string(h.height) + "x" +
                std::to_string(h.width) + " outside [1, " +
                std::to_string(kMaxImageSide) + "]");
  }
  if (h.code_channels < 1 || h.code_channels > 4096) {
    CorruptData("code channel count " + std::to_string(h.code_channels) +
                " out of range");
  }
  if (h.importance_levels < 1 || h.code_channels % h.importance_levels != 0) {
    CorruptData("importance levels L = " + std::to_string(h.importance_levels) +
                " must divide n = " + std::to_string(h.code_channels));
  }
  if (h.quant_levels < 2 || h.quant_levels > 65535) {
    CorruptData("quantization levels T = " + std::to_string(h.quant_levels) +
                " out of range");
  }
}

std::vector<uint8_t> WriteBitstream(const Bitstream& stream) {
  BitstreamHeader h = stream.header;
  h.importance_bytes = static_cast<uint32_t>(stream.importance_payload.size());
  h.code_bytes = static_cast<uint32_t>(stream.code_payload.size());
  ValidateHeader(h);
  ByteWriter w;
  w.Bytes({reinterpret_cast<const uint8_t*>(kStreamMagic), 4});
  w.U32(h.version);
  w.U32(h.height);
  w.U32(h.width);
  w.U32(h.code_channels);
  w.U32(h.importance_levels);
  w.U32(h.quant_levels);
  w.Bytes(h.model_id);
  w.U32(h.importance_bytes);
  w.U32(h.code_bytes);
  w.Bytes(stream.importance_payload);
  w.Bytes(stream.code_payload);
  return std::move(w.bytes());
}

Bitstream ReadBitstream(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kStreamMagic, 4) != 0) {
    CorruptData("not a CWIC stream (bad magic)");
  }
  if (bytes.size() < kHeaderBytes) {
    CorruptData("CWIC stream truncated inside the " +
                std::to_string(kHeaderBytes) + "-byte header");
  }
  ByteReader r(bytes.subspan(4), "CWIC stream");
  Bitstream s;
  BitstreamHeader& h = s.header;
  h.version = r.U32();
  h.height = r.U32();
  h.width = r.U32();
  h.code_channels = r.U32();
  h.importance_levels = r.U32();
  h.quant_levels = r.U32();
  auto id = r.Bytes(16);
  std::copy(id.begin(), id.end(), h.model_id.begin());
  h.importance_bytes = r.U32();
  h.code_bytes = r.U32();
  ValidateHeader(h);
  const uint64_t declared = uint64_t{h.importance_bytes} + h.code_bytes;
  if (r.remaining() != declared) {
    CorruptData("CWIC stream declares " + std::to_string(declared) +
                " payload bytes but carries " + std::to_string(r.remaining()));
  }
  auto imp = r.Bytes(h.importance_bytes);
  auto code = r.Bytes(h.code_bytes);
  s.importance_payload.assign(imp.begin(), imp.end());
  s.code_payload.assign(code.begin(), code.end());
  return s;
}

namespace {

void WriteConfig(ByteWriter& w, const ModelConfig& c) {
  w.U32(static_cast<uint32_t>(c.network.stage_channels.size()));
  for (int v : c.network.stage_channels) w.U32(static_cast<uint32_t>(v));
  w.U32(static_cast<uint32_t>(c.network.dense_convs.size()));
  for (int v : c.network.dense_convs) w.U32(static_cast<uint32_t>(v));
  w.U32(static_cast<uint32_t>(c.network.code_channels));
  w.U32(static_cast<uint32_t>(c.network.kernel));
  w.U32(static_cast<uint32_t>(c.importance.levels));
  w.F64(c.importance.rate);
  w.F64(c.importance.gamma);
  w.F64(c.importance.xi);
  w.F64(c.importance.alpha);
  w.U32(static_cast<uint32_t>(c.quant_levels));
  w.U32(static_cast<uint32_t>(c.tcae_groups));
  w.U32(static_cast<uint32_t>(c.tcae_importance_groups));
  w.U32(static_cast<uint32_t>(c.tcae_kernel));
  w.U32(static_cast<uint32_t>(c.tcae_blocks));
}

ModelConfig ReadConfig(ByteReader& r) {
  ModelConfig c;
  const uint32_t stages = r.Count(3, 3, "stage count");
  c.network.stage_channels.clear();
  for (uint32_t s = 0; s < stages; ++s) {
    c.network.stage_channels.push_back(
        static_cast<int>(r.Count(1, 4096, "stage channels")));
  }
  const uint32_t subs = r.Count(0, 64, "dense sub-block count");
  c.network.dense_convs.clear();
  for (uint32_t s = 0; s < subs; ++s) {
    c.network.dense_convs.push_back(
        static_cast<int>(r.Count(1, 64, "dense conv count")));
  }
  c.network.code_channels = static_cast<int>(r.Count(1, 4096, "n"));
  c.network.kernel = static_cast<int>(r.Count(1, 31, "kernel"));
  c.importance.code_channels = c.network.code_channels;
  c.importance.levels = static_cast<int>(r.Count(1, 4096, "L"));
  c.importance.rate = r.F64();
  c.importance.gamma = r.F64();
  c.importance.xi = r.F64();
  c.importance.alpha = r.F64();
  c.quant_levels = static_cast<int>(r.Count(2, 65535, "T"));
  c.tcae_groups = static_cast<int>(r.Count(1, 256, "tcae groups"));
  c.tcae_importance_groups =
      static_cast<int>(r.Count(1, 256, "importance tcae groups"));
  c.tcae_kernel = static_cast<int>(r.Count(1, 31, "tcae kernel"));
  c.tcae_blocks = static_cast<int>(r.Count(0, 64, "tcae blocks"));
  return c;
}

}  // namespace

std::vector<uint8_t> SaveModel(const ModelBundle& bundle) {
  bundle.CheckConsistent();
  ByteWriter w;
  w.Bytes({reinterpret_cast<const uint8_t*>(kModelMagic), 4});
  w.U32(kModelVersion);
  WriteConfig(w, bundle.config);

  // Params() only hands out pointers; nothing is modified here.
  std::vector<ParamRef> params = const_cast<ModelBundle&>(bundle).Params();
  w.U32(static_cast<uint32_t>(params.size()));
  uint64_t offset = 0;
  for (const ParamRef& p : params) {
    w.Str(p.name);
    w.U32(static_cast<uint32_t>(p.shape.size()));
    for (int d : p.shape) w.U32(static_cast<uint32_t>(d));
    w.U32(static_cast<uint32_t>(offset));
    offset += 4 * p.values->size();
  }
  if (offset > 0xFFFFFFFFull) ConfigError("model too large for a v1 file");
  w.U32(static_cast<uint32_t>(offset));
  for (const ParamRef& p : params) {
    for (double v : *p.values) w.F32(static_cast<float>(v));
  }
  const ModelDigest digest = Blake2b128(w.bytes());
  w.Bytes(digest);
  return std::move(w.bytes());
}

ModelBundle LoadModel(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
    CorruptData("not a CWIC model file (bad magic)");
  }
  if (bytes.size() < 4 + 4 + 16) CorruptData("model file truncated");
  const auto body = bytes.first(bytes.size() - 16);
  ModelDigest stored{};
  std::copy(bytes.end() - 16, bytes.end(), stored.begin());
  if (Blake2b128(body) != stored) {
    CorruptData("model file digest mismatch (file is corrupt)");
  }
  ByteReader r(body.subspan(4), "model file");
  const uint32_t version = r.U32();
  if (version != kModelVersion) {
    CorruptData("unsupported model version " + std::to_string(version));
  }
  ModelConfig config;
  try {
    config = ReadConfig(r);
    config.Validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) {
      CorruptData(std::string("model file config invalid: ") + e.what());
    }
    throw;
  }
  ModelBundle bundle = ModelBundle::Build(config);
  std::vector<ParamRef> params = bundle.Params();

  const uint32_t count = r.U32();
  if (count != params.size()) {
    CorruptData("model manifest lists " + std::to_string(count) +
                " arrays, the configured networks use " +
                std::to_string(params.size()));
  }
  struct Entry {
    uint64_t offset;
    uint64_t bytes;
  };
  std::vector<Entry> entries;
  for (const ParamRef& p : params) {
    const std::string name = r.Str(1024);
    if (name != p.name) {
      CorruptData("model manifest entry '" + name + "' where '" + p.name +
                  "' was expected");
    }
    const uint32_t rank = r.Count(1, 8, "rank");
    std::vector<int> shape;
    for (uint32_t d = 0; d < rank; ++d) {
      shape.push_back(static_cast<int>(r.Count(0, 1u << 24, "dim")));
    }
    if (shape != p.shape) {
      CorruptData("model manifest shape mismatch for '" + name + "'");
    }
    entries.push_back({r.U32(), 4 * p.values->size()});
  }
  const uint32_t blob_bytes = r.U32();
  if (blob_bytes != r.remaining()) {
    CorruptData("model data blob length " + std::to_string(blob_bytes) +
                " does not match the " + std::to_string(r.remaining()) +
                " bytes present");
  }
  const auto blob = r.Bytes(blob_bytes);
  std::vector<size_t> order(entries.size());
  for (size_t n = 0; n < order.size(); ++n) order[n] = n;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return entries[a].offset < entries[b].offset;
  });
  uint64_t end = 0;
  for (size_t n : order) {
    const Entry& e = entries[n];
    if (e.offset < end) CorruptData("model manifest arrays overlap");
    if (e.offset + e.bytes > blob.size()) {
      CorruptData("model manifest array '" + params[n].name +
                  "' lies outside the data blob");
    }
    end = e.offset + e.bytes;
  }
  for (size_t n = 0; n < params.size(); ++n) {
    std::vector<double>& values = *params[n].values;
    const uint8_t* src = blob.data() + entries[n].offset;
    for (size_t v = 0; v < values.size(); ++v) {
      uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= uint32_t{src[4 * v + b]} << (8 * b);
      values[v] = std::bit_cast<float>(bits);
    }
  }
  for (const ParamRef& p : params) CheckFinite(*p.values, p.name);
  ApplyTapMasks(bundle.code_model.net());
  ApplyTapMasks(bundle.importance_model.net());
  try {
    bundle.quantizer.Validate();
  } catch (const Error& e) {
    CorruptData(std::string("model quantizer invalid: ") + e.what());
  }
  bundle.digest = stored;
  return bundle;
}

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) IoError("cannot open '" + path + "' for reading");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) IoError("error reading '" + path + "'");
  return bytes;
}

void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) IoError("error writing '" + path + "'");
}

void SaveModelFile(const ModelBundle& bundle, const std::string& path) {
  WriteFileBytes(path, SaveModel(bundle));
}

ModelBundle LoadModelFile(const std::string& path) {
  return LoadModel(ReadFileBytes(path));
}

}  // namespace cwic
