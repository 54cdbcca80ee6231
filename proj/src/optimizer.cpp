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

#include "cwic/optimizer.hpp"

#include <cmath>

#include "cwic/error.hpp"

namespace cwic {

void AdamStep(std::span<double> params, std::span<const double> grads,
              OptimizerState& state) {
  if (params.size() != grads.size()) {
    ConfigError("adam: parameter/gradient size mismatch (" +
                std::to_string(params.size()) + " vs " +
                std::to_string(grads.size()) + ")");
  }
  if (state.first_moment.empty() && state.second_moment.empty()) {
    state.first_moment.assign(params.size(), 0.0);
    state.second_moment.assign(params.size(), 0.0);
  }
  if (state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    ConfigError("adam: optimizer state shape does not match parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(kAdamBeta1, t);
  const double c2 = 1.0 - std::pow(kAdamBeta2, t);
  for (size_t n = 0; n < params.size(); ++n) {
    double& m = state.first_moment[n];
    double& v = state.second_moment[n];
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grads[n];
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grads[n] * grads[n];
    const double m_hat = m / c1;
    const double v_hat = v / c2;
    params[n] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
  }
}

PlateauSchedule::PlateauSchedule(std::vector<double> rates, int patience)
    : rates_(std::move(rates)), patience_(patience) {
  if (rates_.empty()) ConfigError("learning-rate schedule needs >= 1 rate");
  if (patience_ < 1) ConfigError("learning-rate patience must be >= 1");
}

bool PlateauSchedule::Observe(double epoch_objective) {
  if (!has_best_ || epoch_objective < best_) {
    best_ = epoch_objective;
    has_best_ = true;
    stale_epochs_ = 0;
    return false;
  }
  if (++stale_epochs_ < patience_) return false;
  stale_epochs_ = 0;
  if (index_ + 1 >= rates_.size()) return false;
  ++index_;
  // The smaller rate gets a fresh comparison baseline.
  has_best_ = false;
  return true;
}

}  // namespace cwic
