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

#include "cwic/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cwic/error.hpp"
#include "cwic/importance.hpp"

namespace cwic {

double UniformCodeBits(int64_t mask_sum, int code_positions, int quant_levels,
                       int importance_levels) {
  return static_cast<double>(mask_sum) * std::log2(quant_levels) +
         code_positions * std::log2(importance_levels);
}

Trainer::Trainer(ModelBundle& bundle, const TrainOptions& options)
    : bundle_(bundle),
      options_(options),
      shared_opt_(bundle.nets.shared),
      specific_opt_(bundle.nets.specific),
      importance_opt_(bundle.nets.importance),
      decoder_opt_(bundle.nets.decoder),
      window_(bundle.config.network.code_channels, bundle.config.quant_levels),
      schedule_(options.rates, options.patience) {
  bundle.CheckConsistent();
  if (options.batch_size < 1) ConfigError("batch size must be >= 1");
  if (!(options.quant_lr >= 0.0)) ConfigError("quantizer rate must be >= 0");
}

namespace {

FeatureCuboid MaskAsFeatures(const ImportanceMask& mask) {
  FeatureCuboid out(mask.channels(), mask.height(), mask.width());
  for (size_t n = 0; n < mask.size(); ++n) out[n] = mask[n];
  return out;
}

void CheckScalar(double v, const char* what) {
  if (!std::isfinite(v)) NumericError(std::string("non-finite ") + what);
}

}  // namespace

StepMetrics Trainer::Step(const std::vector<const ImagePlane*>& batch,
                          bool pretrain) {
  if (batch.empty()) ConfigError("empty training batch");
  CwicNetworks& nets = bundle_.nets;
  const ImportanceConfig& icfg = bundle_.config.importance;
  const int n = bundle_.config.network.code_channels;
  const int levels_t = bundle_.config.quant_levels;

  Stack g_shared = ZerosLike(nets.shared);
  Stack g_specific = ZerosLike(nets.specific);
  Stack g_importance = ZerosLike(nets.importance);
  Stack g_decoder = ZerosLike(nets.decoder);
  std::vector<double> g_quant(bundle_.quantizer.weights().size(), 0.0);

  struct PerImage {
    FeatureCuboid p;
    FeatureCuboid grad_z;
    Tape importance_tape;
  };
  std::vector<PerImage> items(batch.size());
  std::vector<const CodeCuboid*> level_ptrs;
  std::vector<CodeCuboid> level_store(batch.size());

  StepMetrics m;
  m.step = step_;
  m.pretrain = pretrain;
  m.learning_rate = schedule_.rate();
  int64_t total_mask = 0;
  double budget = 0.0;
  for (size_t b = 0; b < batch.size(); ++b) {
    const ImagePlane& x = *batch[b];
    Tape shared_tape, specific_tape, decoder_tape;
    const EncoderOutput enc =
        EncoderForward(nets, x, &shared_tape, &specific_tape);
    CheckFinite(enc.features, "encoder output e");
    PerImage& it = items[b];
    it.p = ImportanceForward(nets, enc.shared, &it.importance_tape);
    CheckFinite(it.p, "importance map p");
    Quantized q = Quantize(enc.features, bundle_.quantizer);
    const ImportanceMask mask =
        pretrain ? FullMask(n, enc.features.height(), enc.features.width())
                 : BuildMask(QuantizeImportance(it.p, icfg.levels), n,
                             icfg.levels);
    const FeatureCuboid z = Dequantize(q.levels, mask, bundle_.quantizer);
    const ImagePlane xhat = DecoderForward(nets, z, &decoder_tape);
    CheckFinite(xhat, "reconstruction xhat");

    double loss = 0.0;
    ImagePlane g_x;
    if (options_.loss == DistortionLoss::kMse) {
      loss = MseLoss(xhat, x);
      g_x = MseLossGrad(xhat, x);
    } else {
      loss = MsSsimLoss(xhat, x, options_.ms_ssim);
      g_x = MsSsimLossGrad(xhat, x, options_.ms_ssim);
    }
    CheckScalar(loss, "distortion loss");
    CheckFinite(g_x, "distortion gradient dL_D/dxhat");

    it.grad_z = Backward(nets.decoder, decoder_tape, g_x, g_decoder);
    CheckFinite(it.grad_z, "distortion gradient dL_D/dz");
    // Straight-through: the mask product passes m * g; the quantizer passes
    // its input gradient unchanged.
    const FeatureCuboid g_e =
        StraightThroughGrad(Multiply(it.grad_z, MaskAsFeatures(mask)));
    const FeatureCuboid g_es =
        Backward(nets.specific, specific_tape, g_e, g_specific);
    Backward(nets.shared, shared_tape, g_es, g_shared);

    const std::vector<double> gq =
        QuantizationLossGrad(enc.features, bundle_.quantizer);
    for (size_t v = 0; v < gq.size(); ++v) g_quant[v] += gq[v];
    const double ql = QuantizationLoss(enc.features, bundle_.quantizer);
    CheckScalar(ql, "quantization loss");

    const int64_t msum = MaskSum(mask);
    const int positions = mask.height() * mask.width();
    total_mask += msum;
    budget += icfg.rate * n * positions;
    m.distortion += loss;
    m.rate_loss += RateLoss(mask, icfg.rate);
    m.quant_loss += ql;
    m.mask_sum += static_cast<double>(msum);
    m.bpp_estimate += UniformCodeBits(msum, positions, levels_t, icfg.levels) /
                      (static_cast<double>(x.height()) * x.width());
    level_store[b] = std::move(q.levels);
    level_ptrs.push_back(&level_store[b]);
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  if (!pretrain) {
    const BudgetCase budget_case = ClassifyBudget(total_mask, budget);
    for (PerImage& it : items) {
      const QuantizedImportanceMap l_star =
          SolveOptimalLevels(it.grad_z, icfg, budget_case);
      const FeatureCuboid g_p =
          ImportanceGrad(it.p, l_star, icfg.levels, icfg.alpha);
      Backward(nets.importance, it.importance_tape, g_p, g_importance);
    }
    ScaleInPlace(g_importance, inv);
    importance_opt_.Step(nets.importance, g_importance, schedule_.rate());
  }
  ScaleInPlace(g_shared, inv);
  ScaleInPlace(g_specific, inv);
  ScaleInPlace(g_decoder, inv);
  shared_opt_.Step(nets.shared, g_shared, schedule_.rate());
  specific_opt_.Step(nets.specific, g_specific, schedule_.rate());
  decoder_opt_.Step(nets.decoder, g_decoder, schedule_.rate());

  for (double& g : g_quant) g *= inv;
  CheckFinite(g_quant, "quantizer gradient");
  std::vector<int> reinit;
  // A zero quantizer rate freezes the centers, re-initialization included.
  if (options_.quant_lr > 0.0) {
    quant_state_.learning_rate = options_.quant_lr;
    AdamStep(bundle_.quantizer.weights(), g_quant, quant_state_);
    bundle_.quantizer.ProjectNonNegative();

    window_.PushLevels(level_ptrs);
    reinit = MonitorAndReinit(bundle_.quantizer, window_);
    for (int k : reinit) {
      // Stale moments would immediately undo the fresh spacing.
      for (int t = 0; t < levels_t; ++t) {
        const size_t idx = static_cast<size_t>(k) * levels_t + t;
        quant_state_.first_moment[idx] = 0.0;
        quant_state_.second_moment[idx] = 0.0;
      }
    }
  }
  m.reinitialized = static_cast<int>(reinit.size());

  m.distortion *= inv;
  m.rate_loss *= inv;
  m.quant_loss *= inv;
  m.mask_sum *= inv;
  m.bpp_estimate *= inv;
  ++step_;
  return m;
}

std::vector<TcaeSample> CodeSamples(const std::vector<ImageCodes>& codes) {
  std::vector<TcaeSample> out;
  for (const ImageCodes& c : codes) out.push_back({c.remapped, c.mask});
  return out;
}

std::vector<TcaeSample> ImportanceSamples(const std::vector<ImageCodes>& codes) {
  std::vector<TcaeSample> out;
  for (const ImageCodes& c : codes) out.push_back({c.importance, {}});
  return out;
}

TrainResult TrainModel(ModelBundle& bundle,
                       const std::vector<ImagePlane>& corpus,
                       const TrainOptions& options,
                       const std::function<void(const StepMetrics&)>& on_step) {
  if (corpus.empty()) ConfigError("training corpus is empty");
  for (const ImagePlane& x : corpus) CheckImageDims(x.height(), x.width());
  if (options.steps < 0 || options.pretrain_steps < 0) {
    ConfigError("step counts must be >= 0");
  }
  TrainResult result;
  Trainer trainer(bundle, options);
  std::mt19937_64 rng(options.seed);
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  const size_t batch = static_cast<size_t>(options.batch_size);
  size_t cursor = order.size();
  double epoch_objective = 0.0;
  int epoch_steps = 0;
  const double gamma = bundle.config.importance.gamma;
  for (int step = 0; step < options.steps; ++step) {
    std::vector<const ImagePlane*> items;
    while (items.size() < std::min(batch, corpus.size())) {
      if (cursor == order.size()) {
        if (epoch_steps > 0) {
          trainer.EndEpoch(epoch_objective / epoch_steps);
          epoch_objective = 0.0;
          epoch_steps = 0;
        }
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      items.push_back(&corpus[order[cursor++]]);
    }
    const StepMetrics m = trainer.Step(items, step < options.pretrain_steps);
    epoch_objective += m.distortion + gamma * m.rate_loss;
    ++epoch_steps;
    result.steps.push_back(m);
    if (on_step) on_step(m);
  }

  // Codes must come from the float-rounded networks the file will hold.
  FinalizeModel(bundle);
  if (options.tcae.epochs > 0) {
    std::vector<ImageCodes> codes;
    codes.reserve(corpus.size());
    for (const ImagePlane& x : corpus) codes.push_back(AnalyzeImage(bundle, x));
    result.code_tcae_bits =
        TrainEntropyModel(CodeSamples(codes), bundle.code_model, options.tcae);
    result.importance_tcae_bits = TrainEntropyModel(
        ImportanceSamples(codes), bundle.importance_model, options.tcae);
    FinalizeModel(bundle);
  }
  return result;
}

}  // namespace cwic
