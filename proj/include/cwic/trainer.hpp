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

#ifndef CWIC_TRAINER_HPP_
#define CWIC_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "cwic/autoenc.hpp"
#include "cwic/codec.hpp"
#include "cwic/entropy_model.hpp"
#include "cwic/model.hpp"
#include "cwic/optimizer.hpp"
#include "cwic/quantizer.hpp"

namespace cwic {

struct TrainOptions {
  int steps = 2000;
  // Leading steps run with the mask forced to all ones and no importance
  // updates.
  int pretrain_steps = 0;
  int batch_size = 8;
  // Plateau schedule for the networks (decade drops by default).
  std::vector<double> rates = {1e-4, 1e-5, 1e-6};
  int patience = 5;
  // ADAM step size for the quantizer interval weights.
  double quant_lr = 1e-4;
  DistortionLoss loss = DistortionLoss::kMse;
  MsSsimOptions ms_ssim;
  uint64_t seed = 1;
  // Context models are fitted to the final codes; zero epochs skips this.
  TcaeTrainOptions tcae;
};

struct StepMetrics {
  int64_t step = 0;
  bool pretrain = false;
  double distortion = 0.0;    // L_D, batch mean
  double rate_loss = 0.0;     // L_R, batch mean
  double quant_loss = 0.0;    // L_Quant, batch mean
  double mask_sum = 0.0;      // sum(m), batch mean
  double bpp_estimate = 0.0;  // uniform coding of the masked codes
  double learning_rate = 0.0;
  int reinitialized = 0;      // quantizer channels re-initialized
};

// Bits per pixel of coding sum(m) code symbols with log2(T) bits each and
// h*w importance levels with log2(L) bits each.
double UniformCodeBits(int64_t mask_sum, int code_positions, int quant_levels,
                       int importance_levels);

class Trainer {
 public:
  Trainer(ModelBundle& bundle, const TrainOptions& options);

  // One combined update on a batch of images with dims multiple of 8.
  StepMetrics Step(const std::vector<const ImagePlane*>& batch, bool pretrain);
  // Feeds the learning-rate schedule with an epoch objective.
  bool EndEpoch(double objective) { return schedule_.Observe(objective); }
  double learning_rate() const { return schedule_.rate(); }

 private:
  ModelBundle& bundle_;
  TrainOptions options_;
  StackOptimizer shared_opt_;
  StackOptimizer specific_opt_;
  StackOptimizer importance_opt_;
  StackOptimizer decoder_opt_;
  OptimizerState quant_state_;
  LevelHistogramWindow window_;
  PlateauSchedule schedule_;
  int64_t step_ = 0;
};

struct TrainResult {
  std::vector<StepMetrics> steps;
  // Per-epoch mean bits per coded symbol while fitting the context models.
  std::vector<double> code_tcae_bits;
  std::vector<double> importance_tcae_bits;
};

// Runs options.steps steps over shuffled mini-batches, then rounds the
// parameters to file precision and fits both context models to the codes of
// `corpus`. The bundle is finalized (digest set) on return.
TrainResult TrainModel(ModelBundle& bundle,
                       const std::vector<ImagePlane>& corpus,
                       const TrainOptions& options,
                       const std::function<void(const StepMetrics&)>& on_step =
                           {});

// Context-model training samples: o' weighted by the mask, and QI(p).
std::vector<TcaeSample> CodeSamples(const std::vector<ImageCodes>& codes);
std::vector<TcaeSample> ImportanceSamples(const std::vector<ImageCodes>& codes);

}  // namespace cwic

#endif  // CWIC_TRAINER_HPP_
