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

#ifndef CWIC_QUANTIZER_HPP_
#define CWIC_QUANTIZER_HPP_

#include <cstdint>
#include <deque>
#include <vector>

#include "cwic/tensor.hpp"

namespace cwic {

// Learnt channel-wise multi-valued quantizer. Channel k has T non-negative
// interval weights s[k][t]; its t-th center is the prefix sum
// s[k][0] + ... + s[k][t], so centers never decrease in t.
class QuantizerParams {
 public:
  QuantizerParams() = default;
  QuantizerParams(int num_channels, int num_levels);

  // s[k][0] = 1/(2T), s[k][t>0] = 1/T: centers sit at the midpoints of T
  // equal bins of [0, 1].
  static QuantizerParams Uniform(int num_channels, int num_levels);

  int num_channels() const { return channels_; }
  int num_levels() const { return levels_; }

  double weight(int k, int t) const { return weights_[k * levels_ + t]; }
  double& weight(int k, int t) { return weights_[k * levels_ + t]; }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }

  // n x T centers, row-major.
  std::vector<double> Centers() const;

  // Clamps every weight at zero.
  void ProjectNonNegative();
  void Validate() const;

 private:
  int channels_ = 0;
  int levels_ = 0;
  std::vector<double> weights_;
};

struct Quantized {
  CodeCuboid levels;
  FeatureCuboid values;
};

// Nearest center per element; exact ties go to the lower level.
Quantized Quantize(const FeatureCuboid& e, const QuantizerParams& params);

// z = q[k][level] where mask is set, 0 elsewhere.
FeatureCuboid Dequantize(const CodeCuboid& levels, const BinaryCuboid& mask,
                         const QuantizerParams& params);

// Mean squared quantization error over all elements.
double QuantizationLoss(const FeatureCuboid& e, const QuantizerParams& params);

// d(QuantizationLoss)/d(weights), n x T row-major. Center t of channel k
// depends on weights 0..t, so each element contributes to every weight up to
// its assigned level.
std::vector<double> QuantizationLossGrad(const FeatureCuboid& e,
                                         const QuantizerParams& params);

// Backward rule of the identity proxy used in place of Quantize.
FeatureCuboid StraightThroughGrad(const FeatureCuboid& upstream);

// Per-channel level histograms of the most recent mini-batches.
class LevelHistogramWindow {
 public:
  static constexpr int kWindow = 50;

  LevelHistogramWindow() = default;
  LevelHistogramWindow(int num_channels, int num_levels);

  // Records one mini-batch's level assignments (an n x T count table).
  void Push(const std::vector<int64_t>& counts);
  // Convenience: counts the levels in `levels` and pushes them.
  void PushLevels(const std::vector<const CodeCuboid*>& batch_levels);

  int num_channels() const { return channels_; }
  int num_levels() const { return levels_; }
  // Number of batches recorded for channel k since its last reset.
  int filled(int k) const { return static_cast<int>(history_[k].size()); }
  // Sum of counts for (k, t) over the channel's recorded batches.
  int64_t total(int k, int t) const;
  void ResetChannel(int k);

 private:
  int channels_ = 0;
  int levels_ = 0;
  std::vector<std::deque<std::vector<int64_t>>> history_;
};

// For each channel whose window is full and whose levels t >= t0 (smallest
// such t0, 1 <= t0 <= T-1) received no assignments, sets
// s[k][t] = s[k][t0-1] / (T - t0 + 1) for t = t0-1 .. T-1 and resets the
// channel's window. Returns the re-initialized channel indices.
std::vector<int> MonitorAndReinit(QuantizerParams& params,
                                  LevelHistogramWindow& window);

}  // namespace cwic

#endif  // CWIC_QUANTIZER_HPP_
