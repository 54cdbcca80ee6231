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

#ifndef CWIC_OPTIMIZER_HPP_
#define CWIC_OPTIMIZER_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace cwic {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;

struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  int64_t step = 0;
  double learning_rate = 1e-4;
};

// One bias-corrected ADAM update of `params` in place. The moment buffers are
// sized on first use and must match `params` afterwards.
void AdamStep(std::span<double> params, std::span<const double> grads,
              OptimizerState& state);

// Steps through a fixed list of learning rates, advancing to the next one
// once the per-epoch objective has failed to improve on its best value for
// `patience` successive epochs.
class PlateauSchedule {
 public:
  explicit PlateauSchedule(std::vector<double> rates, int patience = 5);

  double rate() const { return rates_[index_]; }
  size_t stage() const { return index_; }
  // Returns true when this observation moved to a smaller rate.
  bool Observe(double epoch_objective);

 private:
  std::vector<double> rates_;
  int patience_;
  size_t index_ = 0;
  double best_ = 0.0;
  bool has_best_ = false;
  int stale_epochs_ = 0;
};

}  // namespace cwic

#endif  // CWIC_OPTIMIZER_HPP_
