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

#include "cwic/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <string>

#include "cwic/container.hpp"
#include "cwic/error.hpp"

namespace cwic {

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string HeaderToken(std::span<const uint8_t> bytes, size_t& pos,
                        const std::string& what) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    token += static_cast<char>(bytes[pos++]);
    if (token.size() > 16) IoError(what + ": malformed PPM header");
  }
  if (token.empty()) IoError(what + ": truncated PPM header");
  return token;
}

int HeaderInt(std::span<const uint8_t> bytes, size_t& pos,
              const std::string& what) {
  const std::string t = HeaderToken(bytes, pos, what);
  if (!std::all_of(t.begin(), t.end(), ::isdigit) || t.size() > 9) {
    IoError(what + ": bad PPM header number '" + t + "'");
  }
  return std::stoi(t);
}

}  // namespace

ImagePlane DecodePpm(std::span<const uint8_t> bytes, const std::string& what) {
  size_t pos = 0;
  if (HeaderToken(bytes, pos, what) != "P6") {
    IoError(what + ": not a binary PPM (P6) file");
  }
  const int width = HeaderInt(bytes, pos, what);
  const int height = HeaderInt(bytes, pos, what);
  const int maxval = HeaderInt(bytes, pos, what);
  if (width < 1 || height < 1 || width > (1 << 14) || height > (1 << 14)) {
    IoError(what + ": unsupported PPM dims " + std::to_string(width) + "x" +
            std::to_string(height));
  }
  if (maxval < 1 || maxval > 255) {
    IoError(what + ": only 8-bit PPM (maxval <= 255) is supported");
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    IoError(what + ": malformed PPM header");
  }
  ++pos;
  const size_t need = static_cast<size_t>(width) * height * 3;
  if (bytes.size() - pos < need) IoError(what + ": PPM pixel data truncated");
  ImagePlane img(3, height, width);
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      for (int c = 0; c < 3; ++c) {
        img.at(c, i, j) = static_cast<double>(bytes[pos++]) / maxval;
      }
    }
  }
  return img;
}

ImagePlane ReadPpm(const std::string& path) {
  return DecodePpm(ReadFileBytes(path), path);
}

std::vector<uint8_t> ToRgb8(const ImagePlane& image) {
  if (image.channels() != 3) {
    ConfigError("expected a 3-channel image, got " + ShapeString(image));
  }
  std::vector<uint8_t> out(image.plane_size() * 3);
  size_t n = 0;
  for (int i = 0; i < image.height(); ++i) {
    for (int j = 0; j < image.width(); ++j) {
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(image.at(c, i, j), 0.0, 1.0);
        out[n++] = static_cast<uint8_t>(std::lround(v * 255.0));
      }
    }
  }
  return out;
}

ImagePlane FromRgb8(std::span<const uint8_t> rgb, int height, int width) {
  if (height < 1 || width < 1 ||
      rgb.size() != static_cast<size_t>(height) * width * 3) {
    ConfigError("RGB buffer size does not match " + std::to_string(height) +
                "x" + std::to_string(width));
  }
  ImagePlane img(3, height, width);
  size_t n = 0;
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      for (int c = 0; c < 3; ++c) img.at(c, i, j) = rgb[n++] / 255.0;
    }
  }
  return img;
}

ImagePlane Quantize8(const ImagePlane& image) {
  return FromRgb8(ToRgb8(image), image.height(), image.width());
}

std::vector<uint8_t> EncodePpm(const ImagePlane& image) {
  const std::string header = "P6\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  const std::vector<uint8_t> rgb = ToRgb8(image);
  out.insert(out.end(), rgb.begin(), rgb.end());
  return out;
}

void WritePpm(const std::string& path, const ImagePlane& image) {
  WriteFileBytes(path, EncodePpm(image));
}

ImagePlane PadToMultiple(const ImagePlane& image, int multiple) {
  const int h = (image.height() + multiple - 1) / multiple * multiple;
  const int w = (image.width() + multiple - 1) / multiple * multiple;
  ImagePlane out(image.channels(), h, w);
  for (int c = 0; c < image.channels(); ++c) {
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        out.at(c, i, j) = image.at(c, std::min(i, image.height() - 1),
                                   std::min(j, image.width() - 1));
      }
    }
  }
  return out;
}

ImagePlane Crop(const ImagePlane& image, int height, int width) {
  if (height > image.height() || width > image.width()) {
    ConfigError("crop target larger than the image");
  }
  ImagePlane out(image.channels(), height, width);
  for (int c = 0; c < image.channels(); ++c) {
    for (int i = 0; i < height; ++i) {
      for (int j = 0; j < width; ++j) out.at(c, i, j) = image.at(c, i, j);
    }
  }
  return out;
}

std::vector<std::string> ListPpmFiles(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) IoError("'" + dir + "' is not a directory");
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
      out.push_back(entry.path().string());
    }
  }
  if (ec) IoError("cannot list '" + dir + "': " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cwic
