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

#ifndef CWIC_AUTOENC_HPP_
#define CWIC_AUTOENC_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cwic/graph.hpp"
#include "cwic/tensor.hpp"

namespace cwic {

// Encoder: three stride-2 3x3 convs (stage channels c0, c1, c2), a dense
// block after each of the first two, then the encoding-specific part (one
// dense block and a sigmoid conv down to n channels). The importance branch
// reads the shared features through two residual blocks and a sigmoid conv
// to one channel. The decoder mirrors the encoder with conv + depth-to-space
// upsampling and ends in a linear 3-channel conv.
struct NetworkConfig {
  std::vector<int> stage_channels = {16, 24, 32};
  // Conv count of each dense sub-block; one entry per sub-block.
  std::vector<int> dense_convs = {2};
  int code_channels = 8;  // n
  int kernel = 3;

  void Validate() const;
  // 64/128/256 channels with three sub-blocks of 3, 2, 2 convs.
  static NetworkConfig FullScale(int code_channels);
};

// Spatial ratio between an image and its code cuboid.
constexpr int kCodeStride = 8;

struct CwicNetworks {
  NetworkConfig config;
  Stack shared;      // E_s
  Stack specific;    // E_p
  Stack importance;  // P
  Stack decoder;     // D

  static CwicNetworks Build(const NetworkConfig& config);
  static CwicNetworks Random(const NetworkConfig& config, std::mt19937_64& rng);

  // Every parameter array, prefixed by sub-network name.
  std::vector<ParamRef> Params();
};

struct EncoderOutput {
  FeatureCuboid shared;    // es
  FeatureCuboid features;  // e, values in (0, 1)
};

// Image dims must be multiples of 8.
EncoderOutput EncoderForward(const CwicNetworks& nets, const ImagePlane& x,
                             Tape* shared_tape = nullptr,
                             Tape* specific_tape = nullptr);
FeatureCuboid ImportanceForward(const CwicNetworks& nets,
                                const FeatureCuboid& shared,
                                Tape* tape = nullptr);
ImagePlane DecoderForward(const CwicNetworks& nets, const FeatureCuboid& z,
                          Tape* tape = nullptr);

void CheckImageDims(int height, int width);

// (1 / 3HW) * ||xhat - x||^2.
double MseLoss(const ImagePlane& xhat, const ImagePlane& x);
ImagePlane MseLossGrad(const ImagePlane& xhat, const ImagePlane& x);

struct MsSsimOptions {
  int scales = 3;
};

// Minimum side length accepted for `scales` scales.
int MsSsimMinSize(int scales);

// Multi-scale SSIM per colour channel (11-tap Gaussian window, sigma 1.5,
// K1 = 0.01, K2 = 0.03, dynamic range 1, 2x2 average pooling between
// scales), averaged over channels. Per-scale terms are clamped at zero
// before the weighted product.
double MsSsim(const ImagePlane& a, const ImagePlane& b,
              const MsSsimOptions& options = {});
// 100 * (1 - MS-SSIM).
double MsSsimLoss(const ImagePlane& xhat, const ImagePlane& x,
                  const MsSsimOptions& options = {});
// Gradient of MsSsimLoss with respect to xhat.
ImagePlane MsSsimLossGrad(const ImagePlane& xhat, const ImagePlane& x,
                          const MsSsimOptions& options = {});

// The per-scale exponents: the first `scales` standard five-scale weights,
// renormalized to sum to one.
std::vector<double> MsSsimWeights(int scales);

// 10 log10(1 / MSE), capped at 99 dB.
constexpr double kPsnrCap = 99.0;
double Psnr(const ImagePlane& a, const ImagePlane& b);

enum class DistortionLoss : uint8_t { kMse, kMsSsim };

}  // namespace cwic

#endif  // CWIC_AUTOENC_HPP_
