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

#include "cwic/autoenc.hpp"

#include <algorithm>
#include <cmath>

#include "cwic/error.hpp"

namespace cwic {

void NetworkConfig::Validate() const {
  if (stage_channels.size() != 3) {
    ConfigError("network needs exactly three stage channel counts, got " +
                std::to_string(stage_channels.size()));
  }
  for (int c : stage_channels) {
    if (c < 1) ConfigError("stage channel counts must be >= 1");
  }
  for (int c : dense_convs) {
    if (c < 1) ConfigError("dense sub-blocks need >= 1 conv each");
  }
  if (code_channels < 1) ConfigError("code channels n must be >= 1");
  if (kernel < 1 || kernel % 2 == 0) ConfigError("kernel size must be odd");
}

NetworkConfig NetworkConfig::FullScale(int code_channels) {
  NetworkConfig c;
  c.stage_channels = {64, 128, 256};
  c.dense_convs = {3, 2, 2};
  c.code_channels = code_channels;
  return c;
}

namespace {

Stack DenseBlock(int channels, const std::vector<int>& convs, int kernel) {
  std::vector<Stack> branches;
  for (int count : convs) {
    Stack b;
    for (int n = 0; n < count; ++n) {
      b.Conv(MakeConv(channels, channels, kernel, 1));
      if (n + 1 < count) b.Relu();
    }
    branches.push_back(std::move(b));
  }
  Stack s;
  if (!branches.empty()) s.ResidualChain(std::move(branches));
  return s;
}

void Append(Stack& dst, Stack src) {
  for (Op& op : src.ops) dst.ops.push_back(std::move(op));
}

void Upsample(Stack& s, int in_channels, int out_channels, int kernel) {
  s.Conv(MakeConv(out_channels * 4, in_channels, kernel, 1))
      .DepthToSpace(2)
      .Relu();
}

}  // namespace

CwicNetworks CwicNetworks::Build(const NetworkConfig& config) {
  config.Validate();
  const int c0 = config.stage_channels[0];
  const int c1 = config.stage_channels[1];
  const int c2 = config.stage_channels[2];
  const int n = config.code_channels;
  const int ks = config.kernel;
  CwicNetworks nets;
  nets.config = config;

  nets.shared.Conv(MakeConv(c0, 3, ks, 2)).Relu();
  Append(nets.shared, DenseBlock(c0, config.dense_convs, ks));
  nets.shared.Conv(MakeConv(c1, c0, ks, 2)).Relu();
  Append(nets.shared, DenseBlock(c1, config.dense_convs, ks));
  nets.shared.Conv(MakeConv(c2, c1, ks, 2)).Relu();

  Append(nets.specific, DenseBlock(c2, config.dense_convs, ks));
  nets.specific.Conv(MakeConv(n, c2, ks, 1)).Sigmoid();

  Append(nets.importance, DenseBlock(c2, {2, 2}, ks));
  nets.importance.Conv(MakeConv(1, c2, ks, 1)).Sigmoid();

  nets.decoder.Conv(MakeConv(c2, n, ks, 1)).Relu();
  Append(nets.decoder, DenseBlock(c2, config.dense_convs, ks));
  Upsample(nets.decoder, c2, c1, ks);
  Append(nets.decoder, DenseBlock(c1, config.dense_convs, ks));
  Upsample(nets.decoder, c1, c0, ks);
  Append(nets.decoder, DenseBlock(c0, config.dense_convs, ks));
  Upsample(nets.decoder, c0, c0, ks);
  nets.decoder.Conv(MakeConv(3, c0, ks, 1));
  return nets;
}

CwicNetworks CwicNetworks::Random(const NetworkConfig& config,
                                  std::mt19937_64& rng) {
  CwicNetworks nets = Build(config);
  InitStack(nets.shared, rng);
  InitStack(nets.specific, rng);
  InitStack(nets.importance, rng);
  InitStack(nets.decoder, rng);
  return nets;
}

std::vector<ParamRef> CwicNetworks::Params() {
  std::vector<ParamRef> out;
  CollectParams(shared, "encoder.shared", out);
  CollectParams(specific, "encoder.specific", out);
  CollectParams(importance, "importance", out);
  CollectParams(decoder, "decoder", out);
  return out;
}

void CheckImageDims(int height, int width) {
  if (height <= 0 || width <= 0 || height % kCodeStride != 0 ||
      width % kCodeStride != 0) {
    ConfigError("image dims " + std::to_string(height) + "x" +
                std::to_string(width) +
                " must be positive multiples of 8; pad the image (encode "
                "--auto-pad) first");
  }
}

EncoderOutput EncoderForward(const CwicNetworks& nets, const ImagePlane& x,
                             Tape* shared_tape, Tape* specific_tape) {
  if (x.channels() != 3) {
    ConfigError("encoder expects a 3-channel image, got " + ShapeString(x));
  }
  CheckImageDims(x.height(), x.width());
  EncoderOutput out;
  out.shared = Forward(nets.shared, x, shared_tape);
  out.features = Forward(nets.specific, out.shared, specific_tape);
  return out;
}

FeatureCuboid ImportanceForward(const CwicNetworks& nets,
                                const FeatureCuboid& shared, Tape* tape) {
  return Forward(nets.importance, shared, tape);
}

ImagePlane DecoderForward(const CwicNetworks& nets, const FeatureCuboid& z,
                          Tape* tape) {
  if (z.channels() != nets.config.code_channels) {
    ConfigError("decoder expects " +
                std::to_string(nets.config.code_channels) +
                "-channel codes, got " + ShapeString(z));
  }
  return Forward(nets.decoder, z, tape);
}

double MseLoss(const ImagePlane& xhat, const ImagePlane& x) {
  if (!xhat.same_shape(x)) {
    ConfigError("mse: shapes differ " + ShapeString(xhat) + " vs " +
                ShapeString(x));
  }
  double acc = 0.0;
  for (size_t n = 0; n < x.size(); ++n) {
    const double d = xhat[n] - x[n];
    acc += d * d;
  }
  return x.size() == 0 ? 0.0 : acc / static_cast<double>(x.size());
}

ImagePlane MseLossGrad(const ImagePlane& xhat, const ImagePlane& x) {
  if (!xhat.same_shape(x)) {
    ConfigError("mse: shapes differ " + ShapeString(xhat) + " vs " +
                ShapeString(x));
  }
  ImagePlane g(x.channels(), x.height(), x.width());
  const double scale = 2.0 / static_cast<double>(x.size());
  for (size_t n = 0; n < x.size(); ++n) g[n] = scale * (xhat[n] - x[n]);
  return g;
}

double Psnr(const ImagePlane& a, const ImagePlane& b) {
  const double mse = MseLoss(a, b);
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

// ---------------------------------------------------------------------------
// MS-SSIM

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

struct Plane {
  int h = 0;
  int w = 0;
  std::vector<double> v;
  Plane() = default;
  Plane(int h_, int w_) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, 0.0) {}
  double& at(int i, int j) { return v[static_cast<size_t>(i) * w + j]; }
  double at(int i, int j) const { return v[static_cast<size_t>(i) * w + j]; }
};

const std::vector<double>& GaussianTaps() {
  static const std::vector<double> taps = [] {
    std::vector<double> g(kWindow);
    double sum = 0.0;
    for (int n = 0; n < kWindow; ++n) {
      const double d = n - kWindow / 2;
      g[n] = std::exp(-d * d / (2.0 * kSigma * kSigma));
      sum += g[n];
    }
    for (double& v : g) v /= sum;
    return g;
  }();
  return taps;
}

// Valid-mode separable Gaussian filter.
Plane Filter(const Plane& in) {
  const auto& g = GaussianTaps();
  Plane tmp(in.h, in.w - kWindow + 1);
  for (int i = 0; i < tmp.h; ++i) {
    for (int j = 0; j < tmp.w; ++j) {
      double acc = 0.0;
      for (int t = 0; t < kWindow; ++t) acc += g[t] * in.at(i, j + t);
      tmp.at(i, j) = acc;
    }
  }
  Plane out(in.h - kWindow + 1, tmp.w);
  for (int i = 0; i < out.h; ++i) {
    for (int j = 0; j < out.w; ++j) {
      double acc = 0.0;
      for (int t = 0; t < kWindow; ++t) acc += g[t] * tmp.at(i + t, j);
      out.at(i, j) = acc;
    }
  }
  return out;
}

// Adjoint of Filter: scatters a valid-size map back to full size.
Plane FilterAdjoint(const Plane& grad, int h, int w) {
  const auto& g = GaussianTaps();
  Plane tmp(h, grad.w);
  for (int i = 0; i < grad.h; ++i) {
    for (int j = 0; j < grad.w; ++j) {
      for (int t = 0; t < kWindow; ++t) tmp.at(i + t, j) += g[t] * grad.at(i, j);
    }
  }
  Plane out(h, w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < grad.w; ++j) {
      for (int t = 0; t < kWindow; ++t) out.at(i, j + t) += g[t] * tmp.at(i, j);
    }
  }
  return out;
}

Plane Pool(const Plane& in) {
  Plane out(in.h / 2, in.w / 2);
  for (int i = 0; i < out.h; ++i) {
    for (int j = 0; j < out.w; ++j) {
      out.at(i, j) = 0.25 * (in.at(2 * i, 2 * j) + in.at(2 * i, 2 * j + 1) +
                             in.at(2 * i + 1, 2 * j) +
                             in.at(2 * i + 1, 2 * j + 1));
    }
  }
  return out;
}

Plane PoolAdjoint(const Plane& grad, int h, int w) {
  Plane out(h, w);
  for (int i = 0; i < grad.h; ++i) {
    for (int j = 0; j < grad.w; ++j) {
      const double g = 0.25 * grad.at(i, j);
      out.at(2 * i, 2 * j) += g;
      out.at(2 * i, 2 * j + 1) += g;
      out.at(2 * i + 1, 2 * j) += g;
      out.at(2 * i + 1, 2 * j + 1) += g;
    }
  }
  return out;
}

Plane Product(const Plane& a, const Plane& b) {
  Plane out(a.h, a.w);
  for (size_t n = 0; n < a.v.size(); ++n) out.v[n] = a.v[n] * b.v[n];
  return out;
}

// Mean of the contrast-structure map (or of the full SSIM map when
// `with_luminance`), plus, when requested, its gradient with respect to x.
double ScaleTerm(const Plane& x, const Plane& y, bool with_luminance,
                 Plane* grad_x) {
  const Plane mx = Filter(x);
  const Plane my = Filter(y);
  const Plane sxx = Filter(Product(x, x));
  const Plane syy = Filter(Product(y, y));
  const Plane sxy = Filter(Product(x, y));
  const double count = static_cast<double>(mx.v.size());
  Plane d_mu(mx.h, mx.w), d_sxx(mx.h, mx.w), d_sxy(mx.h, mx.w);
  double total = 0.0;
  for (size_t n = 0; n < mx.v.size(); ++n) {
    const double ux = mx.v[n];
    const double uy = my.v[n];
    const double vx = sxx.v[n] - ux * ux;
    const double vy = syy.v[n] - uy * uy;
    const double cxy = sxy.v[n] - ux * uy;
    const double dcs = vx + vy + kC2;
    const double cs = (2.0 * cxy + kC2) / dcs;
    double lum = 1.0;
    double dlum_dux = 0.0;
    if (with_luminance) {
      const double dl = ux * ux + uy * uy + kC1;
      lum = (2.0 * ux * uy + kC1) / dl;
      dlum_dux = (2.0 * uy - 2.0 * ux * lum) / dl;
    }
    total += lum * cs;
    if (grad_x) {
      const double dcs_dux = (-2.0 * uy + 2.0 * ux * cs) / dcs;
      d_mu.v[n] = (cs * dlum_dux + lum * dcs_dux) / count;
      d_sxx.v[n] = lum * (-cs / dcs) / count;
      d_sxy.v[n] = lum * (2.0 / dcs) / count;
    }
  }
  if (grad_x) {
    const Plane a = FilterAdjoint(d_mu, x.h, x.w);
    const Plane b = FilterAdjoint(d_sxx, x.h, x.w);
    const Plane c = FilterAdjoint(d_sxy, x.h, x.w);
    *grad_x = Plane(x.h, x.w);
    for (size_t n = 0; n < x.v.size(); ++n) {
      grad_x->v[n] = a.v[n] + 2.0 * x.v[n] * b.v[n] + y.v[n] * c.v[n];
    }
  }
  return total / count;
}

void CheckMsSsimInputs(const ImagePlane& a, const ImagePlane& b,
                       const MsSsimOptions& options) {
  if (!a.same_shape(b)) {
    ConfigError("ms-ssim: shapes differ " + ShapeString(a) + " vs " +
                ShapeString(b));
  }
  if (options.scales < 1 || options.scales > 5) {
    ConfigError("ms-ssim scales must be in [1, 5]");
  }
  const int need = MsSsimMinSize(options.scales);
  if (a.height() < need || a.width() < need) {
    ConfigError("ms-ssim with " + std::to_string(options.scales) +
                " scales needs images of at least " + std::to_string(need) +
                "x" + std::to_string(need) + ", got " +
                std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                "; use fewer scales");
  }
}

Plane ChannelPlane(const ImagePlane& img, int c) {
  Plane p(img.height(), img.width());
  std::copy(img.plane(c), img.plane(c) + img.plane_size(), p.v.begin());
  return p;
}

// MS-SSIM of one channel; fills grad (same size as x) when non-null.
double ChannelMsSsim(const Plane& x0, const Plane& y0, int scales,
                     Plane* grad) {
  const std::vector<double> weights = MsSsimWeights(scales);
  std::vector<Plane> xs{x0}, ys{y0};
  for (int s = 1; s < scales; ++s) {
    xs.push_back(Pool(xs.back()));
    ys.push_back(Pool(ys.back()));
  }
  std::vector<double> terms(scales);
  std::vector<Plane> term_grads(scales);
  for (int s = 0; s < scales; ++s) {
    terms[s] = ScaleTerm(xs[s], ys[s], s == scales - 1,
                         grad ? &term_grads[s] : nullptr);
  }
  double value = 1.0;
  for (int s = 0; s < scales; ++s) {
    value *= std::pow(std::max(terms[s], 0.0), weights[s]);
  }
  if (grad) {
    // Accumulate from the coarsest scale back to full resolution.
    Plane acc(xs.back().h, xs.back().w);
    for (int s = scales - 1; s >= 0; --s) {
      if (s < scales - 1) acc = PoolAdjoint(acc, xs[s].h, xs[s].w);
      if (terms[s] > 0.0 && value > 0.0) {
        const double coeff = weights[s] * value / terms[s];
        for (size_t n = 0; n < acc.v.size(); ++n) {
          acc.v[n] += coeff * term_grads[s].v[n];
        }
      }
    }
    *grad = std::move(acc);
  }
  return value;
}

}  // namespace

std::vector<double> MsSsimWeights(int scales) {
  static const double kStandard[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  std::vector<double> w(kStandard, kStandard + scales);
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

int MsSsimMinSize(int scales) { return kWindow << (scales - 1); }

double MsSsim(const ImagePlane& a, const ImagePlane& b,
              const MsSsimOptions& options) {
  CheckMsSsimInputs(a, b, options);
  double acc = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    acc += ChannelMsSsim(ChannelPlane(a, c), ChannelPlane(b, c),
                         options.scales, nullptr);
  }
  return acc / a.channels();
}

double MsSsimLoss(const ImagePlane& xhat, const ImagePlane& x,
                  const MsSsimOptions& options) {
  return 100.0 * (1.0 - MsSsim(xhat, x, options));
}

ImagePlane MsSsimLossGrad(const ImagePlane& xhat, const ImagePlane& x,
                          const MsSsimOptions& options) {
  CheckMsSsimInputs(xhat, x, options);
  ImagePlane g(xhat.channels(), xhat.height(), xhat.width());
  const double scale = -100.0 / xhat.channels();
  for (int c = 0; c < xhat.channels(); ++c) {
    Plane grad;
    ChannelMsSsim(ChannelPlane(xhat, c), ChannelPlane(x, c), options.scales,
                  &grad);
    for (size_t n = 0; n < grad.v.size(); ++n) {
      g.plane(c)[n] = scale * grad.v[n];
    }
  }
  return g;
}

}  // namespace cwic
