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

#ifndef CWIC_GRAPH_HPP_
#define CWIC_GRAPH_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cwic/layers.hpp"
#include "cwic/optimizer.hpp"
#include "cwic/tensor.hpp"

namespace cwic {

// A fixed vocabulary of layers wired as a sequential stack. kResidualChain
// holds branch stacks f_0..f_{J-1} and computes u_{j+1} = u_j + f_j(u_j)
// from u_0 = x, which is a dense block whose skip connections are summed
// rather than concatenated (branch j sees x plus every earlier branch
// output, and the block emits x plus all branch outputs).
enum class OpKind : uint8_t {
  kConv,
  kRelu,
  kSigmoid,
  kDepthToSpace,
  kResidualChain,
};

struct Stack;

struct Op {
  OpKind kind = OpKind::kRelu;
  ConvLayerParams conv;
  // Non-empty for trimmed convolutions; same shape as conv.kernel.
  std::vector<uint8_t> tap_mask;
  int factor = 1;
  std::vector<Stack> branches;
};

struct Stack {
  std::vector<Op> ops;

  Stack& Conv(ConvLayerParams params);
  Stack& TrimmedConv(ConvLayerParams params, std::vector<uint8_t> tap_mask);
  Stack& Relu();
  Stack& Sigmoid();
  Stack& DepthToSpace(int factor);
  Stack& ResidualChain(std::vector<Stack> branches);
};

// Per-op inputs recorded by Forward for use in Backward.
struct Tape {
  std::vector<FeatureCuboid> inputs;
  std::vector<FeatureCuboid> outputs;
  std::vector<std::vector<Tape>> branch_tapes;
};

FeatureCuboid Forward(const Stack& stack, const FeatureCuboid& x, Tape* tape,
                      int threads = 1);

// Accumulates parameter gradients into `grads` (a ZerosLike of `stack`) and
// returns the gradient with respect to the stack input.
FeatureCuboid Backward(const Stack& stack, const Tape& tape,
                       const FeatureCuboid& grad_out, Stack& grads);

Stack ZerosLike(const Stack& stack);

struct ParamRef {
  std::string name;
  std::vector<int> shape;
  std::vector<double>* values;
};

// Enumerates every trainable array in a fixed depth-first order, named
// "<prefix>.<op index>.kernel" etc.
void CollectParams(Stack& stack, const std::string& prefix,
                   std::vector<ParamRef>& out);
std::vector<ParamRef> CollectParams(Stack& stack, const std::string& prefix);

// Forces masked kernel taps to zero.
void ApplyTapMasks(Stack& stack);

void ScaleInPlace(Stack& grads, double factor);

// He-uniform kernels, zero biases. Masked taps are left at zero.
void InitStack(Stack& stack, std::mt19937_64& rng);

// One ADAM optimizer state per parameter array of a stack.
class StackOptimizer {
 public:
  StackOptimizer() = default;
  explicit StackOptimizer(Stack& stack);

  void Step(Stack& params, Stack& grads, double learning_rate);
  std::vector<OptimizerState>& states() { return states_; }

 private:
  std::vector<OptimizerState> states_;
};

ConvLayerParams MakeConv(int out_channels, int in_channels, int kernel,
                         int stride);

}  // namespace cwic

#endif  // CWIC_GRAPH_HPP_
