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

#include <cmath>
#include <random>
#include <vector>

#include "cwic/arith_coder.hpp"
#include "cwic/error.hpp"
#include "doctest.h"

namespace cwic {
namespace {

std::vector<double> RandomPmf(std::mt19937_64& rng, int m) {
  std::vector<double> p(m);
  std::exponential_distribution<double> d(1.0);
  double sum = 0.0;
  for (double& v : p) sum += (v = std::pow(d(rng), 3.0));
  for (double& v : p) v /= sum;
  return p;
}

TEST_SUITE("arith-coder") {
  TEST_CASE("pmf quantization") {
    const std::vector<double> uniform(4, 0.25);
    CHECK(QuantizePmf(uniform).frequencies() ==
          std::vector<uint32_t>{16384, 16384, 16384, 16384});
    const std::vector<double> spike = {1.0, 0.0};
    CHECK(QuantizePmf(spike).frequencies() == std::vector<uint32_t>{65535, 1});
  }

  TEST_CASE("quantized tables always sum to 2^16 with a floor of 1") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 500; ++trial) {
      const int m = 2 + static_cast<int>(rng() % 300);
      const FreqTable t = QuantizePmf(RandomPmf(rng, m));
      uint64_t sum = 0;
      for (uint32_t f : t.frequencies()) {
        CHECK(f >= 1);
        sum += f;
      }
      CHECK(sum == kFreqTotal);
    }
  }

  TEST_CASE("invalid frequency tables are rejected") {
    const std::vector<uint32_t> short_sum = {100, 200};
    CHECK_THROWS_AS(FreqTable{short_sum}, Error);
    const std::vector<uint32_t> zero = {0, kFreqTotal};
    CHECK_THROWS_AS(FreqTable{zero}, Error);
  }

  TEST_CASE("empty stream is only the flush") {
    ArithEncoder enc;
    CHECK(enc.Finish().size() <= 5);
  }

  TEST_CASE("eight uniform-4 symbols take 2 to 4 bytes") {
    const FreqTable t = QuantizePmf(std::vector<double>(4, 0.25));
    const std::vector<int> symbols = {0, 3, 1, 2, 2, 1, 3, 0};
    const std::vector<FreqTable> tables(symbols.size(), t);
    const std::vector<uint8_t> payload = EncodeSymbols(symbols, tables);
    CHECK(payload.size() >= 2);
    CHECK(payload.size() <= 4);
    const std::vector<int> back = DecodeSymbols(
        payload, symbols.size(), [&](size_t, std::span<const int>) { return t; });
    CHECK(back == symbols);
  }

  TEST_CASE("round trip with adaptive tables") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 50; ++trial) {
      const size_t count = rng() % 2000;
      std::vector<FreqTable> tables;
      std::vector<int> symbols;
      for (size_t n = 0; n < count; ++n) {
        const std::vector<double> p = RandomPmf(rng, 2 + static_cast<int>(rng() % 20));
        std::discrete_distribution<int> draw(p.begin(), p.end());
        tables.push_back(QuantizePmf(p));
        symbols.push_back(draw(rng));
      }
      const std::vector<uint8_t> payload = EncodeSymbols(symbols, tables);
      double ideal = 0.0;
      for (size_t n = 0; n < count; ++n) ideal += SymbolBits(tables[n], symbols[n]);
      CHECK(8.0 * payload.size() <= ideal + 64.0);
      const std::vector<int> back = DecodeSymbols(
          payload, count,
          [&](size_t index, std::span<const int>) { return tables[index]; });
      CHECK(back == symbols);
    }
  }

  TEST_CASE("extreme probabilities survive carries") {
    const FreqTable skew = QuantizePmf(std::vector<double>{1.0, 0.0});
    std::vector<int> symbols(5000, 0);
    for (size_t n = 0; n < symbols.size(); n += 97) symbols[n] = 1;
    const std::vector<FreqTable> tables(symbols.size(), skew);
    const std::vector<uint8_t> payload = EncodeSymbols(symbols, tables);
    const std::vector<int> back = DecodeSymbols(
        payload, symbols.size(), [&](size_t, std::span<const int>) { return skew; });
    CHECK(back == symbols);
  }

  TEST_CASE("a flipped payload byte is detected or changes the output") {
    std::mt19937_64 rng(53);
    const FreqTable t = QuantizePmf(std::vector<double>{0.5, 0.3, 0.15, 0.05});
    std::vector<int> symbols(400);
    for (int& s : symbols) s = static_cast<int>(rng() % 4);
    const std::vector<FreqTable> tables(symbols.size(), t);
    const std::vector<uint8_t> payload = EncodeSymbols(symbols, tables);
    int detected = 0, changed = 0;
    for (size_t pos = 0; pos < payload.size(); ++pos) {
      std::vector<uint8_t> bad = payload;
      bad[pos] ^= static_cast<uint8_t>(1 + rng() % 255);
      try {
        const std::vector<int> back = DecodeSymbols(
            bad, symbols.size(), [&](size_t, std::span<const int>) { return t; });
        if (back != symbols) ++changed;
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kCorruptData);
        ++detected;
      }
    }
    CHECK(detected + changed == static_cast<int>(payload.size()));
  }

  TEST_CASE("a payload that ends early is a corrupt-data error") {
    const FreqTable t = QuantizePmf(std::vector<double>(256, 1.0 / 256));
    std::vector<int> symbols(64);
    for (size_t n = 0; n < symbols.size(); ++n) symbols[n] = static_cast<int>(n * 37 % 256);
    const std::vector<FreqTable> tables(symbols.size(), t);
    const std::vector<uint8_t> payload = EncodeSymbols(symbols, tables);
    const std::vector<uint8_t> cut(payload.begin(), payload.begin() + payload.size() / 2);
    CHECK_THROWS_AS(DecodeSymbols(cut, symbols.size(),
                                  [&](size_t, std::span<const int>) { return t; }),
                    Error);
  }
}

}  // namespace
}  // namespace cwic
