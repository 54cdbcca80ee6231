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

#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cwic/container.hpp"
#include "cwic/digest.hpp"
#include "cwic/error.hpp"
#include "cwic/image_io.hpp"
#include "cwic/model.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace cwic {
namespace {

uint32_t LoadLe32(const std::vector<uint8_t>& b, size_t at) {
  return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) |
         (static_cast<uint32_t>(b[at + 3]) << 24);
}

ModelConfig SmallConfig() {
  ModelConfig c;
  c.network.stage_channels = {3, 3, 4};
  c.network.dense_convs = {1};
  c.network.code_channels = 4;
  c.importance.code_channels = 4;
  c.importance.levels = 2;
  c.quant_levels = 3;
  c.tcae_groups = 2;
  c.tcae_importance_groups = 3;
  c.tcae_kernel = 3;
  c.tcae_blocks = 1;
  return c;
}

ModelBundle SmallModel(uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelBundle b = ModelBundle::Random(SmallConfig(), rng);
  FinalizeModel(b);
  return b;
}

Bitstream SampleStream() {
  Bitstream s;
  s.header.height = 30;
  s.header.width = 17;
  s.header.code_channels = 8;
  s.header.importance_levels = 4;
  s.header.quant_levels = 5;
  for (int n = 0; n < 16; ++n) s.header.model_id[n] = static_cast<uint8_t>(n * 11);
  s.importance_payload = {1, 2, 3};
  s.code_payload = {9, 8, 7, 6, 5};
  return s;
}

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kInternal;
}

TEST_SUITE("container") {
  TEST_CASE("digest matches reference BLAKE2b-128 vectors") {
    CHECK(DigestHex(Blake2b128({})) == "cae66941d9efbd404e4d88758ea67670");
    const std::string abc = "abc";
    CHECK(DigestHex(Blake2b128({reinterpret_cast<const uint8_t*>(abc.data()),
                                abc.size()})) ==
          "cf4ab791c62b8d2b2109c90275287816");
  }

  TEST_CASE("header layout") {
    const Bitstream s = SampleStream();
    const std::vector<uint8_t> bytes = WriteBitstream(s);
    CHECK(kHeaderBytes == 52);
    REQUIRE(bytes.size() == 52 + 3 + 5);
    CHECK(std::memcmp(bytes.data(), "CWIC", 4) == 0);
    CHECK(LoadLe32(bytes, 4) == 1);
    CHECK(LoadLe32(bytes, 8) == 30);
    CHECK(LoadLe32(bytes, 12) == 17);
    CHECK(LoadLe32(bytes, 16) == 8);
    CHECK(LoadLe32(bytes, 20) == 4);
    CHECK(LoadLe32(bytes, 24) == 5);
    CHECK(bytes[28 + 15] == 15 * 11);
    CHECK(LoadLe32(bytes, 44) == 3);
    CHECK(LoadLe32(bytes, 48) == 5);
    CHECK(bytes[52] == 1);
    CHECK(bytes.back() == 5);
  }

  TEST_CASE("bitstream round trip") {
    Bitstream s = SampleStream();
    const Bitstream back = ReadBitstream(WriteBitstream(s));
    s.header.importance_bytes = 3;
    s.header.code_bytes = 5;
    CHECK(back == s);
  }

  TEST_CASE("wrong magic") {
    std::vector<uint8_t> bytes = WriteBitstream(SampleStream());
    bytes[0] = 'X';
    CHECK(KindOf([&] { ReadBitstream(bytes); }) == ErrorKind::kCorruptData);
  }

  TEST_CASE("every truncation is an error") {
    const std::vector<uint8_t> bytes = WriteBitstream(SampleStream());
    for (size_t n = 0; n < bytes.size(); ++n) {
      const std::vector<uint8_t> cut(bytes.begin(), bytes.begin() + n);
      CHECK(KindOf([&] { ReadBitstream(cut); }) == ErrorKind::kCorruptData);
    }
    std::vector<uint8_t> longer = bytes;
    longer.push_back(0);
    CHECK(KindOf([&] { ReadBitstream(longer); }) == ErrorKind::kCorruptData);
  }

  TEST_CASE("header validation") {
    BitstreamHeader h = SampleStream().header;
    CHECK_NOTHROW(ValidateHeader(h));
    h.importance_levels = 3;
    CHECK_THROWS_AS(ValidateHeader(h), Error);
    h = SampleStream().header;
    h.quant_levels = 1;
    CHECK_THROWS_AS(ValidateHeader(h), Error);
    h = SampleStream().header;
    h.height = 0;
    CHECK_THROWS_AS(ValidateHeader(h), Error);
    h = SampleStream().header;
    h.width = kMaxImageSide + 1;
    CHECK_THROWS_AS(ValidateHeader(h), Error);
    h = SampleStream().header;
    h.version = 2;
    CHECK_THROWS_AS(ValidateHeader(h), Error);
  }

  TEST_CASE("model round trip is byte exact") {
    ModelBundle a = SmallModel(61);
    const std::vector<uint8_t> bytes = SaveModel(a);
    ModelBundle b = LoadModel(bytes);
    CHECK(SaveModel(b) == bytes);
    CHECK(b.digest == a.digest);
    const std::vector<ParamRef> pa = a.Params(), pb = b.Params();
    REQUIRE(pa.size() == pb.size());
    for (size_t n = 0; n < pa.size(); ++n) {
      CHECK(pa[n].name == pb[n].name);
      CHECK(*pa[n].values == *pb[n].values);
    }
  }

  TEST_CASE("digest covers every preceding byte") {
    ModelBundle a = SmallModel(62);
    const std::vector<uint8_t> bytes = SaveModel(a);
    ModelDigest tail;
    std::copy(bytes.end() - 16, bytes.end(), tail.begin());
    CHECK(tail == Blake2b128({bytes.data(), bytes.size() - 16}));
    CHECK(tail == a.digest);
  }

  TEST_CASE("any flipped model byte is a digest error") {
    const std::vector<uint8_t> bytes = SaveModel(SmallModel(63));
    std::mt19937_64 rng(64);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<uint8_t> bad = bytes;
      bad[rng() % bad.size()] ^= static_cast<uint8_t>(1 + rng() % 255);
      try {
        LoadModel(bad);
        FAIL("mutated model loaded");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kCorruptData);
        CHECK(std::string(e.what()).find("digest") != std::string::npos);
      }
    }
  }

  TEST_CASE("truncated model files are rejected") {
    const std::vector<uint8_t> bytes = SaveModel(SmallModel(65));
    for (size_t n : {size_t{0}, size_t{3}, size_t{16}, bytes.size() / 2, bytes.size() - 1}) {
      const std::vector<uint8_t> cut(bytes.begin(), bytes.begin() + n);
      CHECK(KindOf([&] { LoadModel(cut); }) == ErrorKind::kCorruptData);
    }
  }

  TEST_CASE("finalized parameters are float-representable") {
    ModelBundle a = SmallModel(66);
    for (const ParamRef& ref : a.Params()) {
      for (double v : *ref.values) CHECK(static_cast<double>(static_cast<float>(v)) == v);
    }
  }

  TEST_CASE("ppm round trip with comments") {
    std::mt19937_64 rng(67);
    ImagePlane x = Quantize8(testing::RandomCuboid(rng, 3, 5, 7, 0.0, 1.0));
    const std::vector<uint8_t> bytes = EncodePpm(x);
    CHECK(DecodePpm(bytes, "mem") == x);
    std::string text = "P6\n# a comment\n7 5\n# another\n255\n";
    std::vector<uint8_t> with_comments(text.begin(), text.end());
    with_comments.insert(with_comments.end(), bytes.end() - 105, bytes.end());
    CHECK(DecodePpm(with_comments, "mem") == x);
  }

  TEST_CASE("unsupported ppm variants are io errors") {
    const std::string p3 = "P3\n1 1\n255\n0 0 0\n";
    const std::string deep = "P6\n1 1\n65535\n";
    const std::string shortdata = "P6\n2 2\n255\nabc";
    for (const std::string& s : {p3, deep, shortdata}) {
      const std::vector<uint8_t> b(s.begin(), s.end());
      CHECK(KindOf([&] { DecodePpm(b, "mem"); }) == ErrorKind::kIo);
    }
  }

  TEST_CASE("padding replicates edges and crop undoes it") {
    std::mt19937_64 rng(68);
    const ImagePlane x = testing::RandomCuboid(rng, 3, 5, 9, 0.0, 1.0);
    const ImagePlane p = PadToMultiple(x, 8);
    CHECK(p.height() == 8);
    CHECK(p.width() == 16);
    CHECK(p.at(1, 7, 15) == x.at(1, 4, 8));
    CHECK(p.at(2, 2, 12) == x.at(2, 2, 8));
    CHECK(Crop(p, 5, 9) == x);
  }

  TEST_CASE("file helpers report missing paths as io errors") {
    CHECK(KindOf([] { ReadFileBytes("/nonexistent/cwic/file"); }) == ErrorKind::kIo);
    CHECK(KindOf([] { LoadModelFile("/nonexistent/cwic/model"); }) == ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace cwic
