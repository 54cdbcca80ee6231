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

#ifndef CWIC_ENTROPY_MODEL_HPP_
#define CWIC_ENTROPY_MODEL_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cwic/graph.hpp"
#include "cwic/importance.hpp"
#include "cwic/optimizer.hpp"
#include "cwic/tensor.hpp"

namespace cwic {

enum class MaskLayerKind : uint8_t { kInput, kHidden };
enum class CodingOrder : uint8_t { kRaster, kInclined };

// Binary kernel mask over (output channel t, input channel k, row, col) of
// one group pair. Tap (ky, kx) is the spatial offset (ky - kh/2, kx - kw/2).
struct TrimMask {
  int out_channels = 0;
  int in_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  MaskLayerKind layer = MaskLayerKind::kInput;
  CodingOrder order = CodingOrder::kRaster;
  std::vector<uint8_t> bits;

  uint8_t at(int t, int k, int ky, int kx) const {
    return bits[((static_cast<size_t>(t) * in_channels + k) * kernel_h + ky) *
                    kernel_w +
                kx];
  }
};

// Tap live iff input (k, offset) precedes output t in raster order: k < t,
// or k == t with the offset earlier in the plane. Hidden kind also keeps the
// centre tap of the same channel.
TrimMask BuildRasterMask(MaskLayerKind layer, int out_channels,
                         int in_channels, int kernel_h, int kernel_w);

// Tap live iff (k - t) + di + dj < 0 (input kind) or <= 0 (hidden kind):
// the tap's inclined plane precedes (or equals) the output's plane.
TrimMask BuildInclinedMask(MaskLayerKind layer, int out_channels,
                           int in_channels, int kernel_h, int kernel_w);

TrimMask BuildTrimMask(CodingOrder order, MaskLayerKind layer,
                       int out_channels, int in_channels, int kernel_h,
                       int kernel_w);

// Tiles a per-group-pair mask over groups_out x groups_in blocks, giving a
// tap mask for a convolution with groups_out*n outputs and groups_in*n
// inputs.
std::vector<uint8_t> GroupTapMask(const TrimMask& mask, int groups_in,
                                  int groups_out);

struct Position {
  int k = 0;
  int i = 0;
  int j = 0;
  auto operator<=>(const Position&) const = default;
};

// Width fastest, then height, then channel.
std::vector<Position> RasterOrder(int n, int h, int w);
// Plane t holds every (k, i, j) with k + i + j == t, in raster order.
std::vector<std::vector<Position>> InclinedPlanes(int n, int h, int w);
// Coding steps: one position per step for raster, one plane per step for
// inclined. Flattening the steps yields the symbol transmission order.
std::vector<std::vector<Position>> CodingSteps(CodingOrder order, int n, int h,
                                               int w);

// Probability floor applied after softmax, matching the coder's 16-bit
// frequency resolution.
constexpr double kPmfFloor = 1.0 / 65536.0;

class PmfCuboid {
 public:
  PmfCuboid() = default;
  PmfCuboid(int channels, int height, int width, int alphabet);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int alphabet() const { return alphabet_; }

  std::span<double> at(int k, int i, int j) {
    return {probs_.data() + offset(k, i, j), static_cast<size_t>(alphabet_)};
  }
  std::span<const double> at(int k, int i, int j) const {
    return {probs_.data() + offset(k, i, j), static_cast<size_t>(alphabet_)};
  }
  bool operator==(const PmfCuboid&) const = default;

 private:
  size_t offset(int k, int i, int j) const {
    return ((static_cast<size_t>(k) * height_ + i) * width_ + j) * alphabet_;
  }
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  int alphabet_ = 0;
  std::vector<double> probs_;
};

struct TcaeConfig {
  int channels = 1;   // cuboid channels n
  int alphabet = 2;   // m
  int groups = 8;     // groups of every layer except the last
  int kernel = 5;
  int residual_blocks = 3;
  CodingOrder order = CodingOrder::kInclined;

  void Validate() const;
};

// Trimmed convolutional context model. Layout: an input-kind trimmed conv
// (one input group), a hidden trimmed conv, `residual_blocks` residual blocks
// of two hidden trimmed convs, and a final hidden trimmed conv with one
// output group per symbol value. Softmax runs across output groups.
class Tcae {
 public:
  Tcae() = default;
  explicit Tcae(const TcaeConfig& config);

  static Tcae Random(const TcaeConfig& config, std::mt19937_64& rng);

  const TcaeConfig& config() const { return config_; }
  Stack& net() { return net_; }
  const Stack& net() const { return net_; }

  // Logits cuboid: channel b * n + k holds the logit of symbol b at (k, i, j).
  FeatureCuboid Logits(const CodeCuboid& symbols, Tape* tape,
                       int threads = 1) const;
  // One forward pass yields floored PMFs for every position.
  PmfCuboid Predict(const CodeCuboid& symbols, int threads = 1) const;

 private:
  TcaeConfig config_;
  Stack net_;
};

// Symbol value scaled into [0, 1] by 1 / (alphabet - 1).
FeatureCuboid EmbedSymbols(const CodeCuboid& symbols, int alphabet);

// Floored, renormalized softmax over output groups.
PmfCuboid SoftmaxPmfs(const FeatureCuboid& logits, int channels, int alphabet);

// o' = (o + 1) * m: 0 marks masked-out positions, informative levels shift
// to 1..T.
CodeCuboid RemapCodes(const CodeCuboid& levels, const ImportanceMask& mask);
// Inverse on mask-1 positions; masked positions get level 0.
CodeCuboid UnmapCodes(const CodeCuboid& remapped);

// Sum over positions of -w * log2 P(symbol), in bits. An empty `weights`
// counts every position.
double EntropyObjective(const PmfCuboid& pmfs, const CodeCuboid& symbols,
                        const BinaryCuboid& weights);

// Unfloored softmax code length in bits of the weighted symbols, and its
// gradient with respect to the logits when `grad` is non-null.
double CodeLengthWithGrad(const FeatureCuboid& logits,
                          const CodeCuboid& symbols,
                          const BinaryCuboid& weights, int alphabet,
                          FeatureCuboid* grad);

struct TcaeSample {
  CodeCuboid symbols;
  BinaryCuboid weights;  // empty = every position counts
};

struct TcaeTrainOptions {
  int epochs = 10;
  int batch_size = 8;
  std::vector<double> rates = {3e-4, 1e-4, 3.33e-5, 1.11e-5};
  int patience = 5;
  uint64_t seed = 1;
};

class TcaeTrainer {
 public:
  TcaeTrainer(Tcae& model, std::vector<double> rates, int patience);

  // One ADAM step on the summed code length of the batch. Returns the
  // batch's bits per weighted symbol (before the update).
  double Step(const std::vector<const TcaeSample*>& batch);
  // Feeds the learning-rate schedule; returns true on a rate drop.
  bool EndEpoch(double objective) { return schedule_.Observe(objective); }
  double learning_rate() const { return schedule_.rate(); }

 private:
  Tcae& model_;
  StackOptimizer optimizer_;
  PlateauSchedule schedule_;
};

// Per-epoch mean bits per weighted symbol on the training corpus.
std::vector<double> TrainEntropyModel(const std::vector<TcaeSample>& corpus,
                                      Tcae& model,
                                      const TcaeTrainOptions& options);

// Mean bits per weighted symbol of `model` over `corpus`.
double MeanBitsPerSymbol(const std::vector<TcaeSample>& corpus,
                         const Tcae& model);

}  // namespace cwic

#endif  // CWIC_ENTROPY_MODEL_HPP_
