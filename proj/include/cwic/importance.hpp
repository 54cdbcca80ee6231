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

#ifndef CWIC_IMPORTANCE_HPP_
#define CWIC_IMPORTANCE_HPP_

#include <cstdint>

#include "cwic/tensor.hpp"

namespace cwic {

struct ImportanceConfig {
  int levels = 4;          // L
  int code_channels = 8;   // n
  double rate = 0.5;       // r, budget as a fraction of n*h*w
  double gamma = 1e-4;     // rate-loss weight
  double xi = 0.1;         // Taylor trust radius
  double alpha = 0.001;    // stage-2 proxy weight

  int channels_per_level() const { return code_channels / levels; }
  void Validate() const;
};

// Clamp applied to p before level quantization, guarding saturated sigmoids.
constexpr double kImportanceClampLo = 1e-6;
constexpr double kImportanceClampHi = 1.0 - 1e-6;

// 1 x h x w cuboid of levels in [0, L).
using QuantizedImportanceMap = CodeCuboid;
// n x h x w binary mask.
using ImportanceMask = BinaryCuboid;

// QI = l iff l/L <= p < (l+1)/L.
int QuantizeImportanceValue(double p, int levels);
QuantizedImportanceMap QuantizeImportance(const FeatureCuboid& p, int levels);

// m[k][i][j] = 1 iff k < (n/L) * QI[i][j].
ImportanceMask BuildMask(const QuantizedImportanceMap& qi, int code_channels,
                         int levels);
ImportanceMask FullMask(int code_channels, int height, int width);

int64_t MaskSum(const ImportanceMask& mask);

// max{0, sum(m) - r * n * h * w}.
double RateLoss(const ImportanceMask& mask, double rate);
// Same value computed from the level map: max{0, (n/L) sum(QI) - r n h w}.
double RateLossFromLevels(const QuantizedImportanceMap& qi, int code_channels,
                          int levels, double rate);

// Which branch of the per-position stage-1 objective applies; decided once
// per batch from the mask total induced by the current importance map.
enum class BudgetCase { kUnderBudget, kOverBudget };

BudgetCase ClassifyBudget(int64_t mask_total, double budget);

// Per position, the level l* minimizing the relaxed objective
//   under budget: -xi * sum_{k < nl/L} |dL_D/dz_k|
//   over budget:  -xi * sum_{k < nl/L} (|dL_D/dz_k| - gamma/xi) - r n
// with ties resolved toward the smallest l.
QuantizedImportanceMap SolveOptimalLevels(const FeatureCuboid& grad_z,
                                          const ImportanceConfig& cfg,
                                          BudgetCase budget_case);

// Relaxed stage-1 objective at one position for one level; exposed for
// diagnostics and tests.
double RelaxedPositionObjective(const FeatureCuboid& grad_z, int i, int j,
                                int level, const ImportanceConfig& cfg,
                                BudgetCase budget_case);

// Gradient of alpha * |l* - p L| with respect to p.
FeatureCuboid ImportanceGrad(const FeatureCuboid& p,
                             const QuantizedImportanceMap& l_star, int levels,
                             double alpha);

}  // namespace cwic

#endif  // CWIC_IMPORTANCE_HPP_
