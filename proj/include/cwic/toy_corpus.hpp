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

#ifndef CWIC_TOY_CORPUS_HPP_
#define CWIC_TOY_CORPUS_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cwic/tensor.hpp"

namespace cwic {

struct ToyImage {
  ImagePlane image;
  // 1 x (H/8) x (W/8): set where an 8x8 block is covered by texture.
  BinaryCuboid texture;
};

// Smooth colour gradients with one or two textured patches aligned to the
// 8-pixel code grid.
ToyImage MakeToyImage(std::mt19937_64& rng, int size = 32);
std::vector<ToyImage> MakeToyCorpus(int count, uint64_t seed, int size = 32);

// Writes toy_NNNNN.ppm files into `dir` (created if missing).
void WriteToyCorpus(const std::string& dir, int count, uint64_t seed,
                    int size = 32);

}  // namespace cwic

#endif  // CWIC_TOY_CORPUS_HPP_
