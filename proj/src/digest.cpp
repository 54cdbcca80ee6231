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

#include "cwic/digest.hpp"

#include <sodium.h>

#include "cwic/error.hpp"

namespace cwic {

ModelDigest Blake2b128(std::span<const uint8_t> bytes) {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw Error(ErrorKind::kInternal, "libsodium failed to start");
  ModelDigest out{};
  crypto_generichash(out.data(), out.size(), bytes.data(), bytes.size(),
                     nullptr, 0);
  return out;
}

std::string DigestHex(const ModelDigest& digest) {
  static const char kHex[] = "0123456789abcdef";
  std::string s;
  for (uint8_t b : digest) {
    s += kHex[b >> 4];
    s += kHex[b & 15];
  }
  return s;
}

}  // namespace cwic
