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

#ifndef CWIC_LAYERS_HPP_
#define CWIC_LAYERS_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cwic/tensor.hpp"

namespace cwic {

// Kernel layout: out_channels x in_channels x kernel_h x kernel_w. Kernels
// are applied as cross-correlation: output (o, y, x) reads input taps
// (y * stride + ky - padding, x * stride + kx - padding). Out-of-bounds taps
// read zero.
struct ConvLayerParams {
  int out_channels = 0;
  int in_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int stride = 1;
  int padding = 0;
  std::vector<double> kernel;
  std::vector<double> bias;

  static ConvLayerParams Zeros(int out_channels, int in_channels, int kernel_h,
                               int kernel_w, int stride, int padding);

  size_t kernel_index(int o, int i, int ky, int kx) const {
    return ((static_cast<size_t>(o) * in_channels + i) * kernel_h + ky) *
               kernel_w +
           kx;
  }
  double& weight(int o, int i, int ky, int kx) {
    return kernel[kernel_index(o, i, ky, kx)];
  }
  double weight(int o, int i, int ky, int kx) const {
    return kernel[kernel_index(o, i, ky, kx)];
  }

  int output_size(int input_size, int kernel_size) const;
  // Throws a configuration error if any invariant does not hold.
  void Validate() const;
};

struct ConvGradients {
  FeatureCuboid input;
  std::vector<double> kernel;
  std::vector<double> bias;
};

// Runs body(begin, end) over [0, count) split into at most `threads`
// contiguous chunks. threads <= 0 selects the hardware concurrency.
void ParallelFor(int count, int threads,
                 const std::function<void(int, int)>& body);
int ResolveThreads(int threads);

// Taps whose kernel weight is exactly zero are skipped, so trimmed kernels
// (masked taps forced to zero) cost only their live taps. Each output value
// is accumulated in a fixed order independent of `threads`.
FeatureCuboid Conv2dForward(const FeatureCuboid& input,
                            const ConvLayerParams& params, int threads = 1);

// `tap_mask`, when non-empty, has the kernel's shape; kernel gradients at
// zero taps are left at zero.
ConvGradients Conv2dBackward(const FeatureCuboid& input,
                             const ConvLayerParams& params,
                             const FeatureCuboid& upstream,
                             std::span<const uint8_t> tap_mask = {});

FeatureCuboid SigmoidForward(const FeatureCuboid& input);
// Takes the forward output y; returns y * (1 - y) * upstream.
FeatureCuboid SigmoidBackward(const FeatureCuboid& output,
                              const FeatureCuboid& upstream);

FeatureCuboid ReluForward(const FeatureCuboid& input);
FeatureCuboid ReluBackward(const FeatureCuboid& input,
                           const FeatureCuboid& upstream);

// Output channel c at (i * f + dy, j * f + dx) takes input channel
// c * f * f + dy * f + dx at (i, j).
FeatureCuboid DepthToSpace(const FeatureCuboid& input, int factor);
FeatureCuboid SpaceToDepth(const FeatureCuboid& input, int factor);

void AddInPlace(FeatureCuboid& target, const FeatureCuboid& addend);
FeatureCuboid Multiply(const FeatureCuboid& a, const FeatureCuboid& b);

}  // namespace cwic

#endif  // CWIC_LAYERS_HPP_
