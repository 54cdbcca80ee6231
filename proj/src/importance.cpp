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

#include "cwic/importance.hpp"

#include <algorithm>
#include <cmath>

#include "cwic/error.hpp"

namespace cwic {

void ImportanceConfig::Validate() const {
  if (levels < 2) ConfigError("importance levels L must be >= 2");
  if (code_channels < 1) ConfigError("code channels n must be >= 1");
  if (code_channels % levels != 0) {
    ConfigError("code channels n=" + std::to_string(code_channels) +
                " must be a multiple of importance levels L=" +
                std::to_string(levels));
  }
  if (!(rate > 0.0 && rate <= 1.0)) ConfigError("rate r must be in (0, 1]");
  if (!(xi > 0.0)) ConfigError("xi must be > 0");
  if (!(alpha > 0.0)) ConfigError("alpha must be > 0");
  if (!(gamma >= 0.0)) ConfigError("gamma must be >= 0");
}

int QuantizeImportanceValue(double p, int levels) {
  p = std::clamp(p, kImportanceClampLo, kImportanceClampHi);
  int l = std::clamp(static_cast<int>(std::floor(p * levels)), 0, levels - 1);
  // Settle on the interval definition exactly, whatever p * L rounded to.
  while (l > 0 && p < static_cast<double>(l) / levels) --l;
  while (l < levels - 1 && p >= static_cast<double>(l + 1) / levels) ++l;
  return l;
}

QuantizedImportanceMap QuantizeImportance(const FeatureCuboid& p, int levels) {
  if (p.channels() != 1) {
    ConfigError("importance map must have 1 channel, got " +
                std::to_string(p.channels()));
  }
  QuantizedImportanceMap qi(1, p.height(), p.width());
  for (size_t n = 0; n < p.size(); ++n) {
    qi[n] = QuantizeImportanceValue(p[n], levels);
  }
  return qi;
}

ImportanceMask BuildMask(const QuantizedImportanceMap& qi, int code_channels,
                         int levels) {
  if (levels < 1 || code_channels % levels != 0) {
    ConfigError("mask construction needs n mod L == 0 (n=" +
                std::to_string(code_channels) +
                ", L=" + std::to_string(levels) + ")");
  }
  const int per_level = code_channels / levels;
  ImportanceMask m(code_channels, qi.height(), qi.width(), 0);
  for (int i = 0; i < qi.height(); ++i) {
    for (int j = 0; j < qi.width(); ++j) {
      const int kept = per_level * qi.at(0, i, j);
      for (int k = 0; k < kept && k < code_channels; ++k) m.at(k, i, j) = 1;
    }
  }
  return m;
}

ImportanceMask FullMask(int code_channels, int height, int width) {
  return ImportanceMask(code_channels, height, width, 1);
}

int64_t MaskSum(const ImportanceMask& mask) {
  int64_t acc = 0;
  for (uint8_t v : mask.values()) acc += v;
  return acc;
}

double RateLoss(const ImportanceMask& mask, double rate) {
  const double budget = rate * static_cast<double>(mask.size());
  return std::max(0.0, static_cast<double>(MaskSum(mask)) - budget);
}

double RateLossFromLevels(const QuantizedImportanceMap& qi, int code_channels,
                          int levels, double rate) {
  int64_t level_sum = 0;
  for (int32_t v : qi.values()) level_sum += v;
  const double budget =
      rate * static_cast<double>(static_cast<int64_t>(code_channels) *
                                 qi.plane_size());
  const double kept =
      static_cast<double>(code_channels / levels) * static_cast<double>(level_sum);
  return std::max(0.0, kept - budget);
}

BudgetCase ClassifyBudget(int64_t mask_total, double budget) {
  return static_cast<double>(mask_total) < budget ? BudgetCase::kUnderBudget
                                                  : BudgetCase::kOverBudget;
}

namespace {

// Per-channel term of the relaxed objective before the -xi factor.
double ChannelTerm(double grad, const ImportanceConfig& cfg, BudgetCase c) {
  const double a = std::abs(grad);
  return c == BudgetCase::kUnderBudget ? a : a - cfg.gamma / cfg.xi;
}

double FinishObjective(double sum, const ImportanceConfig& cfg, BudgetCase c) {
  const double value = -cfg.xi * sum;
  return c == BudgetCase::kUnderBudget
             ? value
             : value - cfg.rate * cfg.code_channels;
}

}  // namespace

double RelaxedPositionObjective(const FeatureCuboid& grad_z, int i, int j,
                                int level, const ImportanceConfig& cfg,
                                BudgetCase budget_case) {
  const int kept = cfg.channels_per_level() * level;
  double sum = 0.0;
  for (int k = 0; k < kept; ++k) {
    sum += ChannelTerm(grad_z.at(k, i, j), cfg, budget_case);
  }
  return FinishObjective(sum, cfg, budget_case);
}

QuantizedImportanceMap SolveOptimalLevels(const FeatureCuboid& grad_z,
                                          const ImportanceConfig& cfg,
                                          BudgetCase budget_case) {
  cfg.Validate();
  if (grad_z.channels() != cfg.code_channels) {
    ConfigError("stage-1 solver: gradient has " +
                std::to_string(grad_z.channels()) + " channels, n=" +
                std::to_string(cfg.code_channels));
  }
  const int per_level = cfg.channels_per_level();
  QuantizedImportanceMap best(1, grad_z.height(), grad_z.width());
  for (int i = 0; i < grad_z.height(); ++i) {
    for (int j = 0; j < grad_z.width(); ++j) {
      // Running prefix sum over channels; level l covers the first l*n/L.
      double sum = 0.0;
      int k = 0;
      int best_l = 0;
      double best_v = FinishObjective(0.0, cfg, budget_case);
      for (int l = 1; l < cfg.levels; ++l) {
        for (; k < per_level * l; ++k) {
          sum += ChannelTerm(grad_z.at(k, i, j), cfg, budget_case);
        }
        const double v = FinishObjective(sum, cfg, budget_case);
        if (v < best_v) {
          best_v = v;
          best_l = l;
        }
      }
      best.at(0, i, j) = best_l;
    }
  }
  return best;
}

FeatureCuboid ImportanceGrad(const FeatureCuboid& p,
                             const QuantizedImportanceMap& l_star, int levels,
                             double alpha) {
  if (p.channels() != 1 || !p.same_shape(l_star)) {
    ConfigError("importance gradient: p " + ShapeString(p) + " and l* " +
                ShapeString(l_star) + " must both be 1 x h x w");
  }
  FeatureCuboid g(1, p.height(), p.width());
  for (size_t n = 0; n < p.size(); ++n) {
    const double target = static_cast<double>(l_star[n]) / levels;
    if (p[n] < target) {
      g[n] = -alpha;
    } else if (p[n] > target) {
      g[n] = alpha;
    } else {
      g[n] = 0.0;
    }
  }
  return g;
}

}  // namespace cwic
