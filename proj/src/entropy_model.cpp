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

#include "cwic/entropy_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cwic/error.hpp"

namespace cwic {

namespace {

void CheckOddKernel(int kernel_h, int kernel_w) {
  if (kernel_h <= 0 || kernel_w <= 0 || kernel_h % 2 == 0 ||
      kernel_w % 2 == 0) {
    ConfigError("trim mask kernel dims must be odd, got " +
                std::to_string(kernel_h) + "x" + std::to_string(kernel_w));
  }
}

template <typename Live>
TrimMask FillMask(CodingOrder order, MaskLayerKind layer, int out_channels,
                  int in_channels, int kernel_h, int kernel_w, Live live) {
  CheckOddKernel(kernel_h, kernel_w);
  TrimMask m{out_channels, in_channels, kernel_h, kernel_w, layer, order, {}};
  m.bits.resize(static_cast<size_t>(out_channels) * in_channels * kernel_h *
                kernel_w);
  size_t n = 0;
  for (int t = 0; t < out_channels; ++t) {
    for (int k = 0; k < in_channels; ++k) {
      for (int ky = 0; ky < kernel_h; ++ky) {
        for (int kx = 0; kx < kernel_w; ++kx) {
          m.bits[n++] = live(t, k, ky - kernel_h / 2, kx - kernel_w / 2) ? 1 : 0;
        }
      }
    }
  }
  return m;
}

}  // namespace

TrimMask BuildRasterMask(MaskLayerKind layer, int out_channels,
                         int in_channels, int kernel_h, int kernel_w) {
  const bool hidden = layer == MaskLayerKind::kHidden;
  return FillMask(CodingOrder::kRaster, layer, out_channels, in_channels,
                  kernel_h, kernel_w, [hidden](int t, int k, int di, int dj) {
                    if (k < t) return true;
                    if (k > t) return false;
                    if (di < 0) return true;
                    if (di > 0) return false;
                    return hidden ? dj <= 0 : dj < 0;
                  });
}

TrimMask BuildInclinedMask(MaskLayerKind layer, int out_channels,
                           int in_channels, int kernel_h, int kernel_w) {
  const bool hidden = layer == MaskLayerKind::kHidden;
  return FillMask(CodingOrder::kInclined, layer, out_channels, in_channels,
                  kernel_h, kernel_w, [hidden](int t, int k, int di, int dj) {
                    const int shift = (k - t) + di + dj;
                    return hidden ? shift <= 0 : shift < 0;
                  });
}

TrimMask BuildTrimMask(CodingOrder order, MaskLayerKind layer,
                       int out_channels, int in_channels, int kernel_h,
                       int kernel_w) {
  return order == CodingOrder::kRaster
             ? BuildRasterMask(layer, out_channels, in_channels, kernel_h,
                               kernel_w)
             : BuildInclinedMask(layer, out_channels, in_channels, kernel_h,
                                 kernel_w);
}

std::vector<uint8_t> GroupTapMask(const TrimMask& mask, int groups_in,
                                  int groups_out) {
  const int n_out = mask.out_channels;
  const int n_in = mask.in_channels;
  const int taps = mask.kernel_h * mask.kernel_w;
  std::vector<uint8_t> out(static_cast<size_t>(groups_out) * n_out *
                           groups_in * n_in * taps);
  size_t idx = 0;
  for (int go = 0; go < groups_out; ++go) {
    for (int t = 0; t < n_out; ++t) {
      for (int gi = 0; gi < groups_in; ++gi) {
        for (int k = 0; k < n_in; ++k) {
          const uint8_t* src =
              mask.bits.data() + (static_cast<size_t>(t) * n_in + k) * taps;
          std::copy(src, src + taps, out.begin() + idx);
          idx += taps;
        }
      }
    }
  }
  return out;
}

std::vector<Position> RasterOrder(int n, int h, int w) {
  std::vector<Position> order;
  order.reserve(static_cast<size_t>(n) * h * w);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) order.push_back({k, i, j});
    }
  }
  return order;
}

std::vector<std::vector<Position>> InclinedPlanes(int n, int h, int w) {
  if (n <= 0 || h <= 0 || w <= 0) return {};
  std::vector<std::vector<Position>> planes(n + h + w - 2);
  for (const Position& p : RasterOrder(n, h, w)) {
    planes[p.k + p.i + p.j].push_back(p);
  }
  return planes;
}

std::vector<std::vector<Position>> CodingSteps(CodingOrder order, int n, int h,
                                               int w) {
  if (order == CodingOrder::kInclined) return InclinedPlanes(n, h, w);
  std::vector<std::vector<Position>> steps;
  for (const Position& p : RasterOrder(n, h, w)) steps.push_back({p});
  return steps;
}

PmfCuboid::PmfCuboid(int channels, int height, int width, int alphabet)
    : channels_(channels),
      height_(height),
      width_(width),
      alphabet_(alphabet),
      probs_(static_cast<size_t>(channels) * height * width * alphabet, 0.0) {}

void TcaeConfig::Validate() const {
  if (channels < 1) ConfigError("TCAE needs >= 1 cuboid channel");
  if (alphabet < 2) ConfigError("TCAE alphabet must be >= 2");
  if (alphabet > 65536) {
    ConfigError("TCAE alphabet " + std::to_string(alphabet) +
                " exceeds the coder's 2^16 frequency resolution");
  }
  if (groups < 1) ConfigError("TCAE needs >= 1 group");
  if (kernel < 1 || kernel % 2 == 0) ConfigError("TCAE kernel must be odd");
  if (residual_blocks < 0) ConfigError("TCAE residual blocks must be >= 0");
}

Tcae::Tcae(const TcaeConfig& config) : config_(config) {
  config_.Validate();
  const int n = config_.channels;
  const int g = config_.groups;
  const int ks = config_.kernel;
  const TrimMask input_mask =
      BuildTrimMask(config_.order, MaskLayerKind::kInput, n, n, ks, ks);
  const TrimMask hidden_mask =
      BuildTrimMask(config_.order, MaskLayerKind::kHidden, n, n, ks, ks);
  auto trimmed = [&](int groups_in, int groups_out, const TrimMask& mask) {
    ConvLayerParams c = MakeConv(groups_out * n, groups_in * n, ks, 1);
    return std::make_pair(c, GroupTapMask(mask, groups_in, groups_out));
  };

  auto [c0, m0] = trimmed(1, g, input_mask);
  net_.TrimmedConv(std::move(c0), std::move(m0)).Relu();
  auto [c1, m1] = trimmed(g, g, hidden_mask);
  net_.TrimmedConv(std::move(c1), std::move(m1)).Relu();
  for (int b = 0; b < config_.residual_blocks; ++b) {
    Stack branch;
    auto [ca, ma] = trimmed(g, g, hidden_mask);
    auto [cb, mb] = trimmed(g, g, hidden_mask);
    branch.TrimmedConv(std::move(ca), std::move(ma))
        .Relu()
        .TrimmedConv(std::move(cb), std::move(mb));
    net_.ResidualChain({std::move(branch)});
  }
  auto [cf, mf] = trimmed(g, config_.alphabet, hidden_mask);
  net_.TrimmedConv(std::move(cf), std::move(mf));
}

Tcae Tcae::Random(const TcaeConfig& config, std::mt19937_64& rng) {
  Tcae t(config);
  InitStack(t.net_, rng);
  return t;
}

FeatureCuboid EmbedSymbols(const CodeCuboid& symbols, int alphabet) {
  FeatureCuboid x(symbols.channels(), symbols.height(), symbols.width());
  const double scale = 1.0 / (alphabet - 1);
  for (size_t n = 0; n < symbols.size(); ++n) {
    const int32_t s = symbols[n];
    if (s < 0 || s >= alphabet) {
      CorruptData("symbol " + std::to_string(s) + " outside alphabet [0, " +
                  std::to_string(alphabet) + ")");
    }
    x[n] = s * scale;
  }
  return x;
}

FeatureCuboid Tcae::Logits(const CodeCuboid& symbols, Tape* tape,
                           int threads) const {
  if (symbols.channels() != config_.channels) {
    ConfigError("TCAE expects " + std::to_string(config_.channels) +
                "-channel cuboids, got " + ShapeString(symbols));
  }
  return Forward(net_, EmbedSymbols(symbols, config_.alphabet), tape, threads);
}

PmfCuboid SoftmaxPmfs(const FeatureCuboid& logits, int channels,
                      int alphabet) {
  if (logits.channels() != channels * alphabet) {
    ConfigError("logit cuboid has " + std::to_string(logits.channels()) +
                " channels, expected " + std::to_string(channels * alphabet));
  }
  PmfCuboid pmfs(channels, logits.height(), logits.width(), alphabet);
  for (int k = 0; k < channels; ++k) {
    for (int i = 0; i < logits.height(); ++i) {
      for (int j = 0; j < logits.width(); ++j) {
        std::span<double> p = pmfs.at(k, i, j);
        double mx = -INFINITY;
        for (int b = 0; b < alphabet; ++b) {
          mx = std::max(mx, logits.at(b * channels + k, i, j));
        }
        double sum = 0.0;
        for (int b = 0; b < alphabet; ++b) {
          p[b] = std::exp(logits.at(b * channels + k, i, j) - mx);
          sum += p[b];
        }
        double floored = 0.0;
        for (int b = 0; b < alphabet; ++b) {
          p[b] = std::max(p[b] / sum, kPmfFloor);
          floored += p[b];
        }
        for (int b = 0; b < alphabet; ++b) p[b] /= floored;
      }
    }
  }
  return pmfs;
}

PmfCuboid Tcae::Predict(const CodeCuboid& symbols, int threads) const {
  return SoftmaxPmfs(Logits(symbols, nullptr, threads), config_.channels,
                     config_.alphabet);
}

CodeCuboid RemapCodes(const CodeCuboid& levels, const ImportanceMask& mask) {
  if (!levels.same_shape(mask)) {
    ConfigError("remap: code " + ShapeString(levels) + " and mask " +
                ShapeString(mask) + " differ in shape");
  }
  CodeCuboid out(levels.channels(), levels.height(), levels.width());
  for (size_t n = 0; n < levels.size(); ++n) {
    out[n] = mask[n] ? levels[n] + 1 : 0;
  }
  return out;
}

CodeCuboid UnmapCodes(const CodeCuboid& remapped) {
  CodeCuboid out(remapped.channels(), remapped.height(), remapped.width());
  for (size_t n = 0; n < remapped.size(); ++n) {
    out[n] = remapped[n] > 0 ? remapped[n] - 1 : 0;
  }
  return out;
}

double EntropyObjective(const PmfCuboid& pmfs, const CodeCuboid& symbols,
                        const BinaryCuboid& weights) {
  if (symbols.channels() != pmfs.channels() ||
      symbols.height() != pmfs.height() || symbols.width() != pmfs.width()) {
    ConfigError("entropy objective: PMF and symbol cuboids differ in shape");
  }
  if (!weights.empty() && !weights.same_shape(symbols)) {
    ConfigError("entropy objective: weight cuboid has the wrong shape");
  }
  double bits = 0.0;
  for (int k = 0; k < symbols.channels(); ++k) {
    for (int i = 0; i < symbols.height(); ++i) {
      for (int j = 0; j < symbols.width(); ++j) {
        if (!weights.empty() && !weights.at(k, i, j)) continue;
        const int32_t s = symbols.at(k, i, j);
        if (s < 0 || s >= pmfs.alphabet()) {
          CorruptData("symbol outside PMF alphabet");
        }
        bits -= std::log2(std::max(pmfs.at(k, i, j)[s], kPmfFloor));
      }
    }
  }
  return bits;
}

TcaeTrainer::TcaeTrainer(Tcae& model, std::vector<double> rates, int patience)
    : model_(model),
      optimizer_(model.net()),
      schedule_(std::move(rates), patience) {}

double CodeLengthWithGrad(const FeatureCuboid& logits,
                          const CodeCuboid& symbols,
                          const BinaryCuboid& weights, int alphabet,
                          FeatureCuboid* grad) {
  const int n = symbols.channels();
  const int m = alphabet;
  if (logits.channels() != n * m || logits.height() != symbols.height() ||
      logits.width() != symbols.width()) {
    ConfigError("code length: logits " + ShapeString(logits) +
                " do not match symbols " + ShapeString(symbols));
  }
  if (grad) *grad = FeatureCuboid(logits.channels(), logits.height(),
                                  logits.width());
  const double inv_ln2 = 1.0 / std::log(2.0);
  double bits = 0.0;
  std::vector<double> prob(m);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < symbols.height(); ++i) {
      for (int j = 0; j < symbols.width(); ++j) {
        if (!weights.empty() && !weights.at(k, i, j)) continue;
        double mx = -INFINITY;
        for (int b = 0; b < m; ++b) {
          mx = std::max(mx, logits.at(b * n + k, i, j));
        }
        double sum = 0.0;
        for (int b = 0; b < m; ++b) {
          prob[b] = std::exp(logits.at(b * n + k, i, j) - mx);
          sum += prob[b];
        }
        const int s = symbols.at(k, i, j);
        bits += (std::log(sum) - (logits.at(s * n + k, i, j) - mx)) * inv_ln2;
        if (grad) {
          for (int b = 0; b < m; ++b) {
            grad->at(b * n + k, i, j) =
                (prob[b] / sum - (b == s ? 1.0 : 0.0)) * inv_ln2;
          }
        }
      }
    }
  }
  return bits;
}

double TcaeTrainer::Step(const std::vector<const TcaeSample*>& batch) {
  Stack grads = ZerosLike(model_.net());
  double bits = 0.0;
  int64_t counted = 0;
  for (const TcaeSample* sample : batch) {
    Tape tape;
    const FeatureCuboid logits = model_.Logits(sample->symbols, &tape);
    FeatureCuboid up;
    bits += CodeLengthWithGrad(logits, sample->symbols, sample->weights,
                               model_.config().alphabet, &up);
    counted += sample->weights.empty()
                   ? static_cast<int64_t>(sample->symbols.size())
                   : MaskSum(sample->weights);
    Backward(model_.net(), tape, up, grads);
  }
  if (counted == 0) return 0.0;
  ScaleInPlace(grads, 1.0 / static_cast<double>(counted));
  optimizer_.Step(model_.net(), grads, schedule_.rate());
  return bits / static_cast<double>(counted);
}

std::vector<double> TrainEntropyModel(const std::vector<TcaeSample>& corpus,
                                      Tcae& model,
                                      const TcaeTrainOptions& options) {
  std::vector<double> history;
  if (corpus.empty()) return history;
  TcaeTrainer trainer(model, options.rates, options.patience);
  std::mt19937_64 rng(options.seed);
  std::vector<size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  const size_t batch = std::max(1, options.batch_size);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted = 0.0;
    size_t batches = 0;
    for (size_t start = 0; start < order.size(); start += batch) {
      std::vector<const TcaeSample*> items;
      for (size_t n = start; n < std::min(order.size(), start + batch); ++n) {
        items.push_back(&corpus[order[n]]);
      }
      weighted += trainer.Step(items);
      ++batches;
    }
    const double objective = weighted / static_cast<double>(batches);
    history.push_back(objective);
    trainer.EndEpoch(objective);
  }
  return history;
}

double MeanBitsPerSymbol(const std::vector<TcaeSample>& corpus,
                         const Tcae& model) {
  double bits = 0.0;
  int64_t count = 0;
  for (const TcaeSample& s : corpus) {
    const PmfCuboid pmfs = model.Predict(s.symbols);
    bits += EntropyObjective(pmfs, s.symbols, s.weights);
    if (s.weights.empty()) {
      count += static_cast<int64_t>(s.symbols.size());
    } else {
      count += MaskSum(s.weights);
    }
  }
  return count == 0 ? 0.0 : bits / static_cast<double>(count);
}

}  // namespace cwic
