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

#include "cwic/graph.hpp"

#include <cmath>

#include "cwic/error.hpp"

namespace cwic {

Stack& Stack::Conv(ConvLayerParams params) {
  Op op;
  op.kind = OpKind::kConv;
  op.conv = std::move(params);
  ops.push_back(std::move(op));
  return *this;
}

Stack& Stack::TrimmedConv(ConvLayerParams params,
                          std::vector<uint8_t> tap_mask) {
  if (tap_mask.size() != params.kernel.size()) {
    ConfigError("trimmed conv mask has " + std::to_string(tap_mask.size()) +
                " taps, kernel has " + std::to_string(params.kernel.size()));
  }
  Op op;
  op.kind = OpKind::kConv;
  op.conv = std::move(params);
  op.tap_mask = std::move(tap_mask);
  for (size_t n = 0; n < op.tap_mask.size(); ++n) {
    if (!op.tap_mask[n]) op.conv.kernel[n] = 0.0;
  }
  ops.push_back(std::move(op));
  return *this;
}

Stack& Stack::Relu() {
  Op op;
  op.kind = OpKind::kRelu;
  ops.push_back(std::move(op));
  return *this;
}

Stack& Stack::Sigmoid() {
  Op op;
  op.kind = OpKind::kSigmoid;
  ops.push_back(std::move(op));
  return *this;
}

Stack& Stack::DepthToSpace(int factor) {
  Op op;
  op.kind = OpKind::kDepthToSpace;
  op.factor = factor;
  ops.push_back(std::move(op));
  return *this;
}

Stack& Stack::ResidualChain(std::vector<Stack> branches) {
  Op op;
  op.kind = OpKind::kResidualChain;
  op.branches = std::move(branches);
  ops.push_back(std::move(op));
  return *this;
}

FeatureCuboid Forward(const Stack& stack, const FeatureCuboid& x, Tape* tape,
                      int threads) {
  if (tape) {
    tape->inputs.clear();
    tape->outputs.clear();
    tape->branch_tapes.assign(stack.ops.size(), {});
  }
  FeatureCuboid cur = x;
  for (size_t n = 0; n < stack.ops.size(); ++n) {
    const Op& op = stack.ops[n];
    FeatureCuboid next;
    switch (op.kind) {
      case OpKind::kConv:
        next = Conv2dForward(cur, op.conv, threads);
        break;
      case OpKind::kRelu:
        next = ReluForward(cur);
        break;
      case OpKind::kSigmoid:
        next = SigmoidForward(cur);
        break;
      case OpKind::kDepthToSpace:
        next = cwic::DepthToSpace(cur, op.factor);
        break;
      case OpKind::kResidualChain: {
        next = cur;
        std::vector<Tape>* branch_tapes =
            tape ? &tape->branch_tapes[n] : nullptr;
        if (branch_tapes) branch_tapes->resize(op.branches.size());
        for (size_t b = 0; b < op.branches.size(); ++b) {
          FeatureCuboid out =
              Forward(op.branches[b], next,
                      branch_tapes ? &(*branch_tapes)[b] : nullptr, threads);
          AddInPlace(next, out);
        }
        break;
      }
    }
    if (tape) {
      tape->inputs.push_back(std::move(cur));
      tape->outputs.push_back(op.kind == OpKind::kSigmoid ? next
                                                          : FeatureCuboid());
    }
    cur = std::move(next);
  }
  return cur;
}

namespace {

void Accumulate(std::vector<double>& dst, const std::vector<double>& src) {
  for (size_t n = 0; n < dst.size(); ++n) dst[n] += src[n];
}

}  // namespace

FeatureCuboid Backward(const Stack& stack, const Tape& tape,
                       const FeatureCuboid& grad_out, Stack& grads) {
  if (tape.inputs.size() != stack.ops.size() ||
      grads.ops.size() != stack.ops.size()) {
    ConfigError("backward: tape or gradient stack does not match network");
  }
  FeatureCuboid g = grad_out;
  for (size_t idx = stack.ops.size(); idx-- > 0;) {
    const Op& op = stack.ops[idx];
    Op& gop = grads.ops[idx];
    const FeatureCuboid& in = tape.inputs[idx];
    switch (op.kind) {
      case OpKind::kConv: {
        ConvGradients cg = Conv2dBackward(in, op.conv, g, op.tap_mask);
        Accumulate(gop.conv.kernel, cg.kernel);
        Accumulate(gop.conv.bias, cg.bias);
        g = std::move(cg.input);
        break;
      }
      case OpKind::kRelu:
        g = ReluBackward(in, g);
        break;
      case OpKind::kSigmoid:
        g = SigmoidBackward(tape.outputs[idx], g);
        break;
      case OpKind::kDepthToSpace:
        g = SpaceToDepth(g, op.factor);
        break;
      case OpKind::kResidualChain: {
        const auto& branch_tapes = tape.branch_tapes[idx];
        for (size_t b = op.branches.size(); b-- > 0;) {
          FeatureCuboid gb =
              Backward(op.branches[b], branch_tapes[b], g, gop.branches[b]);
          AddInPlace(g, gb);
        }
        break;
      }
    }
  }
  return g;
}

Stack ZerosLike(const Stack& stack) {
  Stack z = stack;
  for (auto& ref : CollectParams(z, "")) {
    std::fill(ref.values->begin(), ref.values->end(), 0.0);
  }
  return z;
}

void CollectParams(Stack& stack, const std::string& prefix,
                   std::vector<ParamRef>& out) {
  for (size_t n = 0; n < stack.ops.size(); ++n) {
    Op& op = stack.ops[n];
    const std::string base = prefix + "." + std::to_string(n);
    if (op.kind == OpKind::kConv) {
      const ConvLayerParams& c = op.conv;
      out.push_back({base + ".kernel",
                     {c.out_channels, c.in_channels, c.kernel_h, c.kernel_w},
                     &op.conv.kernel});
      out.push_back({base + ".bias", {c.out_channels}, &op.conv.bias});
    } else if (op.kind == OpKind::kResidualChain) {
      for (size_t b = 0; b < op.branches.size(); ++b) {
        CollectParams(op.branches[b], base + ".b" + std::to_string(b), out);
      }
    }
  }
}

std::vector<ParamRef> CollectParams(Stack& stack, const std::string& prefix) {
  std::vector<ParamRef> out;
  CollectParams(stack, prefix, out);
  return out;
}

void ApplyTapMasks(Stack& stack) {
  for (Op& op : stack.ops) {
    if (op.kind == OpKind::kConv && !op.tap_mask.empty()) {
      for (size_t n = 0; n < op.tap_mask.size(); ++n) {
        if (!op.tap_mask[n]) op.conv.kernel[n] = 0.0;
      }
    }
    for (Stack& b : op.branches) ApplyTapMasks(b);
  }
}

void ScaleInPlace(Stack& grads, double factor) {
  for (auto& ref : CollectParams(grads, "")) {
    for (double& v : *ref.values) v *= factor;
  }
}

void InitStack(Stack& stack, std::mt19937_64& rng) {
  for (Op& op : stack.ops) {
    if (op.kind == OpKind::kConv) {
      ConvLayerParams& c = op.conv;
      size_t live = c.kernel.size();
      if (!op.tap_mask.empty()) {
        live = 0;
        for (uint8_t m : op.tap_mask) live += m ? 1 : 0;
      }
      // Fan-in counts only live taps so trimmed layers keep unit gain.
      const double fan_in =
          std::max<double>(1.0, static_cast<double>(live) / c.out_channels);
      const double bound = std::sqrt(6.0 / fan_in);
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (size_t n = 0; n < c.kernel.size(); ++n) {
        const bool masked = !op.tap_mask.empty() && !op.tap_mask[n];
        c.kernel[n] = masked ? 0.0 : dist(rng);
      }
      std::fill(c.bias.begin(), c.bias.end(), 0.0);
    }
    for (Stack& b : op.branches) InitStack(b, rng);
  }
}

StackOptimizer::StackOptimizer(Stack& stack) {
  states_.resize(CollectParams(stack, "").size());
}

void StackOptimizer::Step(Stack& params, Stack& grads, double learning_rate) {
  auto p = CollectParams(params, "");
  auto g = CollectParams(grads, "");
  if (p.size() != g.size() || p.size() != states_.size()) {
    ConfigError("optimizer: parameter list does not match optimizer state");
  }
  for (size_t n = 0; n < p.size(); ++n) {
    states_[n].learning_rate = learning_rate;
    AdamStep(*p[n].values, *g[n].values, states_[n]);
  }
  ApplyTapMasks(params);
}

ConvLayerParams MakeConv(int out_channels, int in_channels, int kernel,
                         int stride) {
  return ConvLayerParams::Zeros(out_channels, in_channels, kernel, kernel,
                                stride, kernel / 2);
}

}  // namespace cwic
