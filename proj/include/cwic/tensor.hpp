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

#ifndef CWIC_TENSOR_HPP_
#define CWIC_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cwic {

// Dense rank-3 array stored row-major in (channel, row, column) order. The
// same layout is used by the container format.
template <typename T>
class Cuboid {
 public:
  Cuboid() = default;
  Cuboid(int channels, int height, int width, T fill = T{})
      : channels_(channels),
        height_(height),
        width_(width),
        values_(static_cast<size_t>(channels) * height * width, fill) {}

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  size_t size() const { return values_.size(); }
  size_t plane_size() const { return static_cast<size_t>(height_) * width_; }
  bool empty() const { return values_.empty(); }

  size_t index(int k, int i, int j) const {
    return (static_cast<size_t>(k) * height_ + i) * width_ + j;
  }
  T& at(int k, int i, int j) { return values_[index(k, i, j)]; }
  const T& at(int k, int i, int j) const { return values_[index(k, i, j)]; }

  T* plane(int k) { return values_.data() + k * plane_size(); }
  const T* plane(int k) const { return values_.data() + k * plane_size(); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T& operator[](size_t n) { return values_[n]; }
  const T& operator[](size_t n) const { return values_[n]; }

  bool same_shape(const Cuboid& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }
  template <typename U>
  bool same_shape(const Cuboid<U>& other) const {
    return channels_ == other.channels() && height_ == other.height() &&
           width_ == other.width();
  }

  bool operator==(const Cuboid&) const = default;

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<T> values_;
};

using FeatureCuboid = Cuboid<double>;
// 3 x H x W image with [0,1]-scaled samples.
using ImagePlane = Cuboid<double>;
// Integer symbols: quantization levels o, remapped codes o', and the
// quantized importance map as a 1-channel cuboid.
using CodeCuboid = Cuboid<int32_t>;
using BinaryCuboid = Cuboid<uint8_t>;

std::string ShapeString(int channels, int height, int width);

template <typename T>
std::string ShapeString(const Cuboid<T>& c) {
  return ShapeString(c.channels(), c.height(), c.width());
}

// Throws a numeric error naming `what` if any value is NaN or infinite.
void CheckFinite(const FeatureCuboid& c, const std::string& what);
void CheckFinite(std::span<const double> values, const std::string& what);

}  // namespace cwic

#endif  // CWIC_TENSOR_HPP_
