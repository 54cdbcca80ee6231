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

#include "cwic/quantizer.hpp"

#include <algorithm>

#include "cwic/error.hpp"

namespace cwic {

QuantizerParams::QuantizerParams(int num_channels, int num_levels)
    : channels_(num_channels),
      levels_(num_levels),
      weights_(static_cast<size_t>(num_channels) * num_levels, 0.0) {
  if (num_channels < 1) ConfigError("quantizer needs n >= 1");
  if (num_levels < 2) ConfigError("quantizer needs T >= 2");
}

QuantizerParams QuantizerParams::Uniform(int num_channels, int num_levels) {
  QuantizerParams p(num_channels, num_levels);
  for (int k = 0; k < num_channels; ++k) {
    p.weight(k, 0) = 1.0 / (2.0 * num_levels);
    for (int t = 1; t < num_levels; ++t) p.weight(k, t) = 1.0 / num_levels;
  }
  return p;
}

std::vector<double> QuantizerParams::Centers() const {
  std::vector<double> centers(weights_.size());
  for (int k = 0; k < channels_; ++k) {
    double acc = 0.0;
    for (int t = 0; t < levels_; ++t) {
      acc += weight(k, t);
      centers[k * levels_ + t] = acc;
    }
  }
  return centers;
}

void QuantizerParams::ProjectNonNegative() {
  for (double& s : weights_) s = std::max(s, 0.0);
}

void QuantizerParams::Validate() const {
  if (channels_ < 1 || levels_ < 2) {
    ConfigError("quantizer needs n >= 1 and T >= 2");
  }
  for (double s : weights_) {
    if (!(s >= 0.0)) ConfigError("quantizer interval weights must be >= 0");
  }
}

namespace {

void CheckChannels(const FeatureCuboid& e, const QuantizerParams& params) {
  if (e.channels() != params.num_channels()) {
    ConfigError("quantizer has " + std::to_string(params.num_channels()) +
                " channels, feature map has " + std::to_string(e.channels()));
  }
}

int NearestLevel(double v, const double* centers, int levels) {
  int best = 0;
  double best_d = (v - centers[0]) * (v - centers[0]);
  for (int t = 1; t < levels; ++t) {
    const double d = (v - centers[t]) * (v - centers[t]);
    if (d < best_d) {
      best_d = d;
      best = t;
    }
  }
  return best;
}

}  // namespace

Quantized Quantize(const FeatureCuboid& e, const QuantizerParams& params) {
  CheckChannels(e, params);
  const std::vector<double> centers = params.Centers();
  const int levels = params.num_levels();
  Quantized q{CodeCuboid(e.channels(), e.height(), e.width()),
              FeatureCuboid(e.channels(), e.height(), e.width())};
  for (int k = 0; k < e.channels(); ++k) {
    const double* ck = centers.data() + k * levels;
    const double* src = e.plane(k);
    int32_t* lv = q.levels.plane(k);
    double* val = q.values.plane(k);
    for (size_t n = 0; n < e.plane_size(); ++n) {
      const int t = NearestLevel(src[n], ck, levels);
      lv[n] = t;
      val[n] = ck[t];
    }
  }
  return q;
}

FeatureCuboid Dequantize(const CodeCuboid& levels, const BinaryCuboid& mask,
                         const QuantizerParams& params) {
  if (!levels.same_shape(mask)) {
    ConfigError("dequantize: levels " + ShapeString(levels) +
                " and mask " + ShapeString(mask) + " differ in shape");
  }
  if (levels.channels() != params.num_channels()) {
    ConfigError("dequantize: code has " + std::to_string(levels.channels()) +
                " channels, quantizer has " +
                std::to_string(params.num_channels()));
  }
  const std::vector<double> centers = params.Centers();
  const int T = params.num_levels();
  FeatureCuboid z(levels.channels(), levels.height(), levels.width());
  for (int k = 0; k < levels.channels(); ++k) {
    for (size_t n = 0; n < levels.plane_size(); ++n) {
      if (!mask.plane(k)[n]) continue;
      const int32_t t = levels.plane(k)[n];
      if (t < 0 || t >= T) {
        CorruptData("quantization level " + std::to_string(t) +
                    " outside [0, " + std::to_string(T) + ")");
      }
      z.plane(k)[n] = centers[k * T + t];
    }
  }
  return z;
}

double QuantizationLoss(const FeatureCuboid& e, const QuantizerParams& params) {
  const Quantized q = Quantize(e, params);
  double acc = 0.0;
  for (size_t n = 0; n < e.size(); ++n) {
    const double d = q.values[n] - e[n];
    acc += d * d;
  }
  return e.size() == 0 ? 0.0 : acc / static_cast<double>(e.size());
}

std::vector<double> QuantizationLossGrad(const FeatureCuboid& e,
                                         const QuantizerParams& params) {
  const Quantized q = Quantize(e, params);
  const int T = params.num_levels();
  std::vector<double> grad(params.weights().size(), 0.0);
  if (e.size() == 0) return grad;
  const double scale = 2.0 / static_cast<double>(e.size());
  std::vector<double> per_level(T);
  for (int k = 0; k < e.channels(); ++k) {
    std::fill(per_level.begin(), per_level.end(), 0.0);
    for (size_t n = 0; n < e.plane_size(); ++n) {
      per_level[q.levels.plane(k)[n]] +=
          scale * (q.values.plane(k)[n] - e.plane(k)[n]);
    }
    // Weight t feeds every center t' >= t.
    double suffix = 0.0;
    for (int t = T - 1; t >= 0; --t) {
      suffix += per_level[t];
      grad[k * T + t] = suffix;
    }
  }
  return grad;
}

FeatureCuboid StraightThroughGrad(const FeatureCuboid& upstream) {
  return upstream;
}

LevelHistogramWindow::LevelHistogramWindow(int num_channels, int num_levels)
    : channels_(num_channels), levels_(num_levels), history_(num_channels) {}

void LevelHistogramWindow::Push(const std::vector<int64_t>& counts) {
  if (counts.size() != static_cast<size_t>(channels_) * levels_) {
    ConfigError("level histogram has wrong size");
  }
  for (int k = 0; k < channels_; ++k) {
    auto& h = history_[k];
    h.emplace_back(counts.begin() + k * levels_,
                   counts.begin() + (k + 1) * levels_);
    while (h.size() > static_cast<size_t>(kWindow)) h.pop_front();
  }
}

void LevelHistogramWindow::PushLevels(
    const std::vector<const CodeCuboid*>& batch_levels) {
  std::vector<int64_t> counts(static_cast<size_t>(channels_) * levels_, 0);
  for (const CodeCuboid* lv : batch_levels) {
    for (int k = 0; k < channels_; ++k) {
      for (size_t n = 0; n < lv->plane_size(); ++n) {
        ++counts[k * levels_ + lv->plane(k)[n]];
      }
    }
  }
  Push(counts);
}

int64_t LevelHistogramWindow::total(int k, int t) const {
  int64_t acc = 0;
  for (const auto& batch : history_[k]) acc += batch[t];
  return acc;
}

void LevelHistogramWindow::ResetChannel(int k) { history_[k].clear(); }

std::vector<int> MonitorAndReinit(QuantizerParams& params,
                                  LevelHistogramWindow& window) {
  std::vector<int> reinitialized;
  const int T = params.num_levels();
  for (int k = 0; k < params.num_channels(); ++k) {
    if (window.filled(k) < LevelHistogramWindow::kWindow) continue;
    // Smallest t0 such that every level >= t0 is unused.
    int t0 = T;
    while (t0 > 0 && window.total(k, t0 - 1) == 0) --t0;
    if (t0 >= T || t0 < 1) continue;
    const double share = params.weight(k, t0 - 1) / (T - t0 + 1);
    for (int t = t0 - 1; t < T; ++t) params.weight(k, t) = share;
    window.ResetChannel(k);
    reinitialized.push_back(k);
  }
  return reinitialized;
}

}  // namespace cwic
