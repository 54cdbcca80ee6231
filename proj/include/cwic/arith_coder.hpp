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

#ifndef CWIC_ARITH_CODER_HPP_
#define CWIC_ARITH_CODER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cwic {

constexpr int kFreqBits = 16;
constexpr uint32_t kFreqTotal = 1u << kFreqBits;

// Cumulative integer frequencies summing to exactly 2^16; every symbol has
// frequency >= 1.
class FreqTable {
 public:
  FreqTable() = default;
  // Throws a configuration error unless the frequencies are all >= 1 and
  // sum to kFreqTotal.
  explicit FreqTable(std::span<const uint32_t> frequencies);

  int size() const { return static_cast<int>(cumulative_.size()) - 1; }
  uint32_t low(int symbol) const { return cumulative_[symbol]; }
  uint32_t freq(int symbol) const {
    return cumulative_[symbol + 1] - cumulative_[symbol];
  }
  // Symbol s with low(s) <= target < low(s + 1); target < kFreqTotal.
  int Find(uint32_t target) const;
  std::vector<uint32_t> frequencies() const;

  bool operator==(const FreqTable&) const = default;

 private:
  std::vector<uint32_t> cumulative_;
};

// Largest-remainder apportionment of 2^16 - m extra counts on top of a
// floor of 1 per symbol. The PMF is normalized by its sum first; remainder
// ties go to the lower symbol.
FreqTable QuantizePmf(std::span<const double> pmf);

// Ideal code length of `symbol` under `table`, in bits.
double SymbolBits(const FreqTable& table, int symbol);

// 32-bit range coder with byte-wise renormalization and carry propagation
// into already-emitted bytes.
class ArithEncoder {
 public:
  void Encode(int symbol, const FreqTable& table);
  // Emits the shortest byte prefix of a value inside the final interval; the
  // decoder reads zero bytes past the end. Returns the payload.
  std::vector<uint8_t> Finish();

 private:
  void PropagateCarry();

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  std::vector<uint8_t> out_;
};

class ArithDecoder {
 public:
  // Bytes past the end of `payload` read as zero. Reading more than
  // kMaxOverread of them means the payload ended early.
  static constexpr int kMaxOverread = 4;

  explicit ArithDecoder(std::span<const uint8_t> payload);

  // Throws a corrupt-data error when the payload cannot be a valid stream
  // under `table`.
  int Decode(const FreqTable& table);

 private:
  uint8_t NextByte();

  std::span<const uint8_t> payload_;
  size_t pos_ = 0;
  int overread_ = 0;
  uint32_t code_ = 0;  // value minus low
  uint32_t range_ = 0xFFFFFFFFu;
};

std::vector<uint8_t> EncodeSymbols(std::span<const int> symbols,
                                   std::span<const FreqTable> tables);

// provider(index, decoded_so_far) returns the table for symbol `index`.
using FreqProvider =
    std::function<FreqTable(size_t index, std::span<const int> decoded)>;

std::vector<int> DecodeSymbols(std::span<const uint8_t> payload, size_t count,
                               const FreqProvider& provider);

}  // namespace cwic

#endif  // CWIC_ARITH_CODER_HPP_
