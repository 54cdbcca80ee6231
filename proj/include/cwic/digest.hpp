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

#ifndef CWIC_DIGEST_HPP_
#define CWIC_DIGEST_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace cwic {

using ModelDigest = std::array<uint8_t, 16>;

// BLAKE2b with a 16-byte output.
ModelDigest Blake2b128(std::span<const uint8_t> bytes);

std::string DigestHex(const ModelDigest& digest);

}  // namespace cwic

#endif  // CWIC_DIGEST_HPP_
