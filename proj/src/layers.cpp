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

#include "cwic/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "cwic/error.hpp"

namespace cwic {

std::string ShapeString(int channels, int height, int width) {
  std::ostringstream os;
  os << channels << "x" << height << "x" << width;
  return os.str();
}

void CheckFinite(std::span<const double> values, const std::string& what) {
  for (size_t n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n])) {
      std::ostringstream os;
      os << "non-finite value in " << what << " at flat index " << n;
      NumericError(os.str());
    }
  }
}

void CheckFinite(const FeatureCuboid& c, const std::string& what) {
  CheckFinite(c.values(), what + " (" + ShapeString(c) + ")");
}

ConvLayerParams ConvLayerParams::Zeros(int out_channels, int in_channels,
                                       int kernel_h, int kernel_w, int stride,
                                       int padding) {
  ConvLayerParams p;
  p.out_channels = out_channels;
  p.in_channels = in_channels;
  p.kernel_h = kernel_h;
  p.kernel_w = kernel_w;
  p.stride = stride;
  p.padding = padding;
  p.kernel.assign(
      static_cast<size_t>(out_channels) * in_channels * kernel_h * kernel_w,
      0.0);
  p.bias.assign(out_channels, 0.0);
  return p;
}

int ConvLayerParams::output_size(int input_size, int kernel_size) const {
  const int span = input_size + 2 * padding - kernel_size;
  if (span < 0) return 0;
  return span / stride + 1;
}

void ConvLayerParams::Validate() const {
  if (out_channels <= 0 || in_channels <= 0) {
    ConfigError("convolution needs positive channel counts, got out=" +
                std::to_string(out_channels) +
                " in=" + std::to_string(in_channels));
  }
  if (kernel_h <= 0 || kernel_w <= 0 || kernel_h % 2 == 0 ||
      kernel_w % 2 == 0) {
    ConfigError("convolution kernel dims must be odd, got " +
                std::to_string(kernel_h) + "x" + std::to_string(kernel_w));
  }
  if (stride < 1 || padding < 0) {
    ConfigError("convolution stride must be >= 1 and padding >= 0");
  }
  if (kernel.size() != static_cast<size_t>(out_channels) * in_channels *
                           kernel_h * kernel_w) {
    ConfigError("convolution kernel array has " +
                std::to_string(kernel.size()) + " values, shape needs " +
                std::to_string(static_cast<size_t>(out_channels) *
                               in_channels * kernel_h * kernel_w));
  }
  if (bias.size() != static_cast<size_t>(out_channels)) {
    ConfigError("convolution bias length " + std::to_string(bias.size()) +
                " does not match out_channels " +
                std::to_string(out_channels));
  }
}

int ResolveThreads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void ParallelFor(int count, int threads,
                 const std::function<void(int, int)>& body) {
  if (count <= 0) return;
  const int workers = std::min(ResolveThreads(threads), count);
  if (workers <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const int chunk = (count + workers - 1) / workers;
  for (int w = 1; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(body, begin, end);
  }
  body(0, std::min(count, chunk));
  for (auto& t : pool) t.join();
}

namespace {

// Range of output coordinates o with 0 <= o * stride + tap - padding < size.
struct Span1d {
  int begin;
  int end;
};

Span1d ValidOutputs(int out_size, int in_size, int tap, int stride,
                    int padding) {
  // o * stride >= padding - tap
  int lo = padding - tap;
  int begin = lo <= 0 ? 0 : (lo + stride - 1) / stride;
  // o * stride <= in_size - 1 + padding - tap
  int hi = in_size - 1 + padding - tap;
  int end = hi < 0 ? 0 : hi / stride + 1;
  begin = std::max(begin, 0);
  end = std::min(end, out_size);
  if (end < begin) end = begin;
  return {begin, end};
}

void CheckConvInput(const FeatureCuboid& input, const ConvLayerParams& p) {
  p.Validate();
  if (input.channels() != p.in_channels) {
    ConfigError("convolution input has " + std::to_string(input.channels()) +
                " channels, layer expects in_channels=" +
                std::to_string(p.in_channels));
  }
  if (p.output_size(input.height(), p.kernel_h) <= 0) {
    ConfigError("convolution input height " + std::to_string(input.height()) +
                " too small for kernel_h " + std::to_string(p.kernel_h));
  }
  if (p.output_size(input.width(), p.kernel_w) <= 0) {
    ConfigError("convolution input width " + std::to_string(input.width()) +
                " too small for kernel_w " + std::to_string(p.kernel_w));
  }
}

}  // namespace

FeatureCuboid Conv2dForward(const FeatureCuboid& input,
                            const ConvLayerParams& p, int threads) {
  CheckConvInput(input, p);
  const int in_h = input.height();
  const int in_w = input.width();
  const int out_h = p.output_size(in_h, p.kernel_h);
  const int out_w = p.output_size(in_w, p.kernel_w);
  FeatureCuboid out(p.out_channels, out_h, out_w);
  const int s = p.stride;

  ParallelFor(p.out_channels, threads, [&](int o_begin, int o_end) {
    for (int o = o_begin; o < o_end; ++o) {
      double* dst = out.plane(o);
      std::fill(dst, dst + out.plane_size(), p.bias[o]);
      for (int c = 0; c < p.in_channels; ++c) {
        const double* src = input.plane(c);
        for (int ky = 0; ky < p.kernel_h; ++ky) {
          const Span1d rows = ValidOutputs(out_h, in_h, ky, s, p.padding);
          for (int kx = 0; kx < p.kernel_w; ++kx) {
            const double w = p.weight(o, c, ky, kx);
            if (w == 0.0) continue;
            const Span1d cols = ValidOutputs(out_w, in_w, kx, s, p.padding);
            for (int y = rows.begin; y < rows.end; ++y) {
              const double* src_row =
                  src + static_cast<size_t>(y * s + ky - p.padding) * in_w;
              double* dst_row = dst + static_cast<size_t>(y) * out_w;
              if (s == 1) {
                const double* sp = src_row + kx - p.padding;
                for (int x = cols.begin; x < cols.end; ++x) {
                  dst_row[x] += w * sp[x];
                }
              } else {
                for (int x = cols.begin; x < cols.end; ++x) {
                  dst_row[x] += w * src_row[x * s + kx - p.padding];
                }
              }
            }
          }
        }
      }
    }
  });
  return out;
}

ConvGradients Conv2dBackward(const FeatureCuboid& input,
                             const ConvLayerParams& p,
                             const FeatureCuboid& upstream,
                             std::span<const uint8_t> tap_mask) {
  CheckConvInput(input, p);
  const int in_h = input.height();
  const int in_w = input.width();
  const int out_h = p.output_size(in_h, p.kernel_h);
  const int out_w = p.output_size(in_w, p.kernel_w);
  if (upstream.channels() != p.out_channels || upstream.height() != out_h ||
      upstream.width() != out_w) {
    ConfigError("convolution upstream gradient is " + ShapeString(upstream) +
                ", forward output is " +
                ShapeString(p.out_channels, out_h, out_w));
  }
  if (!tap_mask.empty() && tap_mask.size() != p.kernel.size()) {
    ConfigError("convolution tap mask size does not match kernel size");
  }
  const int s = p.stride;
  ConvGradients g;
  g.input = FeatureCuboid(p.in_channels, in_h, in_w);
  g.kernel.assign(p.kernel.size(), 0.0);
  g.bias.assign(p.out_channels, 0.0);

  for (int o = 0; o < p.out_channels; ++o) {
    const double* up = upstream.plane(o);
    double acc = 0.0;
    for (size_t n = 0; n < upstream.plane_size(); ++n) acc += up[n];
    g.bias[o] = acc;
    for (int c = 0; c < p.in_channels; ++c) {
      const double* src = input.plane(c);
      double* gin = g.input.plane(c);
      for (int ky = 0; ky < p.kernel_h; ++ky) {
        const Span1d rows = ValidOutputs(out_h, in_h, ky, s, p.padding);
        for (int kx = 0; kx < p.kernel_w; ++kx) {
          const size_t widx = p.kernel_index(o, c, ky, kx);
          const bool live = tap_mask.empty() || tap_mask[widx] != 0;
          const double w = p.kernel[widx];
          if (!live && w == 0.0) continue;
          const Span1d cols = ValidOutputs(out_w, in_w, kx, s, p.padding);
          double wgrad = 0.0;
          for (int y = rows.begin; y < rows.end; ++y) {
            const size_t in_row =
                static_cast<size_t>(y * s + ky - p.padding) * in_w;
            const double* up_row = up + static_cast<size_t>(y) * out_w;
            for (int x = cols.begin; x < cols.end; ++x) {
              const size_t in_idx = in_row + x * s + kx - p.padding;
              wgrad += up_row[x] * src[in_idx];
              gin[in_idx] += w * up_row[x];
            }
          }
          if (live) g.kernel[widx] = wgrad;
        }
      }
    }
  }
  return g;
}

FeatureCuboid SigmoidForward(const FeatureCuboid& input) {
  // Clamped so outputs stay inside the open interval (0, 1) even when the
  // exponential saturates.
  constexpr double kLo = std::numeric_limits<double>::min();
  const double kHi = std::nextafter(1.0, 0.0);
  FeatureCuboid out(input.channels(), input.height(), input.width());
  for (size_t n = 0; n < input.size(); ++n) {
    const double x = input[n];
    double y;
    if (x >= 0) {
      y = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      y = e / (1.0 + e);
    }
    out[n] = std::clamp(y, kLo, kHi);
  }
  return out;
}

FeatureCuboid SigmoidBackward(const FeatureCuboid& output,
                              const FeatureCuboid& upstream) {
  if (!output.same_shape(upstream)) {
    ConfigError("sigmoid backward shape mismatch: " + ShapeString(output) +
                " vs " + ShapeString(upstream));
  }
  FeatureCuboid g(output.channels(), output.height(), output.width());
  for (size_t n = 0; n < output.size(); ++n) {
    const double y = output[n];
    g[n] = y * (1.0 - y) * upstream[n];
  }
  return g;
}

FeatureCuboid ReluForward(const FeatureCuboid& input) {
  FeatureCuboid out = input;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

FeatureCuboid ReluBackward(const FeatureCuboid& input,
                           const FeatureCuboid& upstream) {
  if (!input.same_shape(upstream)) {
    ConfigError("relu backward shape mismatch: " + ShapeString(input) +
                " vs " + ShapeString(upstream));
  }
  FeatureCuboid g = upstream;
  for (size_t n = 0; n < g.size(); ++n) {
    if (!(input[n] > 0.0)) g[n] = 0.0;
  }
  return g;
}

FeatureCuboid DepthToSpace(const FeatureCuboid& input, int factor) {
  if (factor < 1) ConfigError("depth_to_space factor must be >= 1");
  const int ff = factor * factor;
  if (input.channels() % ff != 0) {
    ConfigError("depth_to_space: channels " +
                std::to_string(input.channels()) + " not divisible by " +
                std::to_string(ff));
  }
  const int oc = input.channels() / ff;
  FeatureCuboid out(oc, input.height() * factor, input.width() * factor);
  for (int c = 0; c < oc; ++c) {
    for (int dy = 0; dy < factor; ++dy) {
      for (int dx = 0; dx < factor; ++dx) {
        const int src_c = c * ff + dy * factor + dx;
        for (int i = 0; i < input.height(); ++i) {
          for (int j = 0; j < input.width(); ++j) {
            out.at(c, i * factor + dy, j * factor + dx) = input.at(src_c, i, j);
          }
        }
      }
    }
  }
  return out;
}

FeatureCuboid SpaceToDepth(const FeatureCuboid& input, int factor) {
  if (factor < 1) ConfigError("space_to_depth factor must be >= 1");
  if (input.height() % factor != 0 || input.width() % factor != 0) {
    ConfigError("space_to_depth: spatial dims " + ShapeString(input) +
                " not divisible by " + std::to_string(factor));
  }
  const int ff = factor * factor;
  const int h = input.height() / factor;
  const int w = input.width() / factor;
  FeatureCuboid out(input.channels() * ff, h, w);
  for (int c = 0; c < input.channels(); ++c) {
    for (int dy = 0; dy < factor; ++dy) {
      for (int dx = 0; dx < factor; ++dx) {
        const int dst_c = c * ff + dy * factor + dx;
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) {
            out.at(dst_c, i, j) = input.at(c, i * factor + dy, j * factor + dx);
          }
        }
      }
    }
  }
  return out;
}

void AddInPlace(FeatureCuboid& target, const FeatureCuboid& addend) {
  if (!target.same_shape(addend)) {
    ConfigError("elementwise add shape mismatch: " + ShapeString(target) +
                " vs " + ShapeString(addend));
  }
  for (size_t n = 0; n < target.size(); ++n) target[n] += addend[n];
}

FeatureCuboid Multiply(const FeatureCuboid& a, const FeatureCuboid& b) {
  if (!a.same_shape(b)) {
    ConfigError("elementwise multiply shape mismatch: " + ShapeString(a) +
                " vs " + ShapeString(b));
  }
  FeatureCuboid out = a;
  for (size_t n = 0; n < out.size(); ++n) out[n] *= b[n];
  return out;
}

}  // namespace cwic
