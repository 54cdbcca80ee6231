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

#ifndef CWIC_IMAGE_IO_HPP_
#define CWIC_IMAGE_IO_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cwic/tensor.hpp"

namespace cwic {

// Binary PPM (P6) with maxval <= 255. Samples are scaled to [0, 1].
ImagePlane ReadPpm(const std::string& path);
ImagePlane DecodePpm(std::span<const uint8_t> bytes, const std::string& what);
// Clamps to [0, 1] and rounds to 8 bits.
void WritePpm(const std::string& path, const ImagePlane& image);
std::vector<uint8_t> EncodePpm(const ImagePlane& image);

// Interleaved 8-bit RGB <-> planar [0, 1] image.
ImagePlane FromRgb8(std::span<const uint8_t> rgb, int height, int width);
std::vector<uint8_t> ToRgb8(const ImagePlane& image);
// The image after an 8-bit export and re-import.
ImagePlane Quantize8(const ImagePlane& image);

// Replicates the last row and column up to the next multiple of `multiple`.
ImagePlane PadToMultiple(const ImagePlane& image, int multiple);
ImagePlane Crop(const ImagePlane& image, int height, int width);

// Sorted paths of the *.ppm files directly inside `dir`.
std::vector<std::string> ListPpmFiles(const std::string& dir);

}  // namespace cwic

#endif  // CWIC_IMAGE_IO_HPP_
