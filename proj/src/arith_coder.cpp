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

#include "cwic/arith_coder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cwic/error.hpp"

namespace cwic {

namespace {

constexpr uint32_t kTopValue = 1u << 24;

}  // namespace

FreqTable::FreqTable(std::span<const uint32_t> frequencies) {
  if (frequencies.empty()) ConfigError("frequency table needs >= 1 symbol");
  cumulative_.resize(frequencies.size() + 1);
  cumulative_[0] = 0;
  uint64_t acc = 0;
  for (size_t s = 0; s < frequencies.size(); ++s) {
    if (frequencies[s] == 0) {
      ConfigError("frequency table: symbol " + std::to_string(s) +
                  " has zero frequency");
    }
    acc += frequencies[s];
    if (acc > kFreqTotal) ConfigError("frequency table total exceeds 2^16");
    cumulative_[s + 1] = static_cast<uint32_t>(acc);
  }
  if (acc != kFreqTotal) {
    ConfigError("frequency table total " + std::to_string(acc) +
                " is not 2^16");
  }
}

int FreqTable::Find(uint32_t target) const {
  // First cumulative bound strictly greater than target, minus one.
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  return static_cast<int>(it - cumulative_.begin()) - 1;
}

std::vector<uint32_t> FreqTable::frequencies() const {
  std::vector<uint32_t> f(size());
  for (int s = 0; s < size(); ++s) f[s] = freq(s);
  return f;
}

FreqTable QuantizePmf(std::span<const double> pmf) {
  const size_t m = pmf.size();
  if (m == 0) ConfigError("cannot quantize an empty PMF");
  if (m > kFreqTotal) {
    ConfigError("alphabet of " + std::to_string(m) +
                " symbols exceeds the 2^16 frequency total");
  }
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      ConfigError("PMF entries must be finite and non-negative");
    }
    sum += p;
  }
  if (!(sum > 0.0)) ConfigError("PMF sums to zero");

  const uint32_t spare = kFreqTotal - static_cast<uint32_t>(m);
  std::vector<uint32_t> freq(m, 1);
  std::vector<double> remainder(m);
  uint64_t assigned = 0;
  for (size_t s = 0; s < m; ++s) {
    const double share = pmf[s] / sum * spare;
    const double whole = std::floor(share);
    freq[s] += static_cast<uint32_t>(whole);
    assigned += static_cast<uint64_t>(whole);
    remainder[s] = share - whole;
  }
  // Rounding can in principle overshoot by a count; take it back from the
  // largest bins.
  while (assigned > spare) {
    size_t big = 0;
    for (size_t s = 1; s < m; ++s) {
      if (freq[s] > freq[big]) big = s;
    }
    --freq[big];
    --assigned;
  }
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainder[a] > remainder[b];
  });
  for (size_t n = 0; assigned < spare; n = (n + 1) % m) {
    ++freq[order[n]];
    ++assigned;
  }
  return FreqTable(freq);
}

double SymbolBits(const FreqTable& table, int symbol) {
  return -std::log2(static_cast<double>(table.freq(symbol)) / kFreqTotal);
}

void ArithEncoder::PropagateCarry() {
  for (size_t n = out_.size(); n-- > 0;) {
    if (++out_[n] != 0) return;
  }
}

void ArithEncoder::Encode(int symbol, const FreqTable& table) {
  if (symbol < 0 || symbol >= table.size()) {
    ConfigError("symbol " + std::to_string(symbol) + " outside table of " +
                std::to_string(table.size()));
  }
  const uint32_t r = range_ >> kFreqBits;
  low_ += static_cast<uint64_t>(r) * table.low(symbol);
  range_ = r * table.freq(symbol);
  if (low_ >> 32) {
    PropagateCarry();
    low_ &= 0xFFFFFFFFu;
  }
  while (range_ < kTopValue) {
    out_.push_back(static_cast<uint8_t>(low_ >> 24));
    low_ = (low_ << 8) & 0xFFFFFFFFu;
    range_ <<= 8;
  }
}

std::vector<uint8_t> ArithEncoder::Finish() {
  const uint64_t hi = low_ + range_;
  for (int bytes = 0; bytes <= 4; ++bytes) {
    const uint64_t grain = (uint64_t{1} << (32 - 8 * bytes)) - 1;
    const uint64_t v = (low_ + grain) & ~grain;
    if (v >= hi) continue;
    if (v >> 32) PropagateCarry();
    for (int b = 0; b < bytes; ++b) {
      out_.push_back(static_cast<uint8_t>(v >> (24 - 8 * b)));
    }
    break;
  }
  std::vector<uint8_t> result = std::move(out_);
  out_.clear();
  low_ = 0;
  range_ = 0xFFFFFFFFu;
  return result;
}

ArithDecoder::ArithDecoder(std::span<const uint8_t> payload)
    : payload_(payload) {
  for (int n = 0; n < 4; ++n) code_ = (code_ << 8) | NextByte();
}

uint8_t ArithDecoder::NextByte() {
  if (pos_ < payload_.size()) return payload_[pos_++];
  if (++overread_ > kMaxOverread) {
    CorruptData("arithmetic payload exhausted before the expected symbol "
                "count");
  }
  return 0;
}

int ArithDecoder::Decode(const FreqTable& table) {
  const uint32_t r = range_ >> kFreqBits;
  const uint32_t target = code_ / r;
  if (target >= kFreqTotal) {
    CorruptData("arithmetic payload inconsistent with the symbol model");
  }
  const int symbol = table.Find(target);
  code_ -= r * table.low(symbol);
  range_ = r * table.freq(symbol);
  while (range_ < kTopValue) {
    code_ = (code_ << 8) | NextByte();
    range_ <<= 8;
  }
  return symbol;
}

std::vector<uint8_t> EncodeSymbols(std::span<const int> symbols,
                                   std::span<const FreqTable> tables) {
  if (symbols.size() != tables.size()) {
    ConfigError("encode: one frequency table per symbol required");
  }
  ArithEncoder enc;
  for (size_t n = 0; n < symbols.size(); ++n) enc.Encode(symbols[n], tables[n]);
  return enc.Finish();
}

std::vector<int> DecodeSymbols(std::span<const uint8_t> payload, size_t count,
                               const FreqProvider& provider) {
  ArithDecoder dec(payload);
  std::vector<int> out;
  out.reserve(count);
  for (size_t n = 0; n < count; ++n) {
    const FreqTable table = provider(n, out);
    out.push_back(dec.Decode(table));
  }
  return out;
}

}  // namespace cwic
