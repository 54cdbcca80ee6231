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

#include "cwic/toy_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cwic/autoenc.hpp"
#include "cwic/error.hpp"
#include "cwic/image_io.hpp"

namespace cwic {

ToyImage MakeToyImage(std::mt19937_64& rng, int size) {
  if (size < kCodeStride || size % kCodeStride != 0) {
    ConfigError("toy image size must be a positive multiple of 8");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  ToyImage out;
  out.image = ImagePlane(3, size, size);
  const int blocks = size / kCodeStride;
  out.texture = BinaryCuboid(1, blocks, blocks, 0);

  for (int c = 0; c < 3; ++c) {
    const double base = range(0.25, 0.75);
    const double gy = range(-0.3, 0.3);
    const double gx = range(-0.3, 0.3);
    for (int i = 0; i < size; ++i) {
      for (int j = 0; j < size; ++j) {
        out.image.at(c, i, j) = std::clamp(
            base + gy * (i / double(size) - 0.5) + gx * (j / double(size) - 0.5),
            0.0, 1.0);
      }
    }
  }

  const int patches = 1 + static_cast<int>(rng() % 2);
  for (int n = 0; n < patches; ++n) {
    const int side = (blocks >= 2 && rng() % 2) ? 2 : 1;
    const int bi = static_cast<int>(rng() % (blocks - side + 1));
    const int bj = static_cast<int>(rng() % (blocks - side + 1));
    const double fy = range(1.2, 2.6);
    const double fx = range(1.2, 2.6);
    const double phase = range(0.0, 6.3);
    const double amp = range(0.25, 0.4);
    for (int i = bi * kCodeStride; i < (bi + side) * kCodeStride; ++i) {
      for (int j = bj * kCodeStride; j < (bj + side) * kCodeStride; ++j) {
        const double wave = std::sin(fy * i + phase) * std::sin(fx * j);
        for (int c = 0; c < 3; ++c) {
          const double noise = range(-0.15, 0.15);
          out.image.at(c, i, j) =
              std::clamp(0.5 + amp * wave + noise, 0.0, 1.0);
        }
      }
    }
    for (int i = bi; i < bi + side; ++i) {
      for (int j = bj; j < bj + side; ++j) out.texture.at(0, i, j) = 1;
    }
  }
  return out;
}

std::vector<ToyImage> MakeToyCorpus(int count, uint64_t seed, int size) {
  if (count < 0) ConfigError("toy corpus count must be >= 0");
  std::mt19937_64 rng(seed);
  std::vector<ToyImage> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) out.push_back(MakeToyImage(rng, size));
  return out;
}

void WriteToyCorpus(const std::string& dir, int count, uint64_t seed,
                    int size) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) IoError("cannot create '" + dir + "': " + ec.message());
  const std::vector<ToyImage> corpus = MakeToyCorpus(count, seed, size);
  for (int n = 0; n < count; ++n) {
    char name[32];
    std::snprintf(name, sizeof(name), "toy_%05d.ppm", n);
    WritePpm((std::filesystem::path(dir) / name).string(), corpus[n].image);
  }
}

}  // namespace cwic
