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

#ifndef CWIC_MODEL_HPP_
#define CWIC_MODEL_HPP_

#include <random>
#include <vector>

#include "cwic/autoenc.hpp"
#include "cwic/digest.hpp"
#include "cwic/entropy_model.hpp"
#include "cwic/graph.hpp"
#include "cwic/importance.hpp"
#include "cwic/quantizer.hpp"

namespace cwic {

// Everything needed to rebuild the networks before parameters are loaded.
struct ModelConfig {
  NetworkConfig network;
  ImportanceConfig importance;
  int quant_levels = 4;  // T
  // Context model shape; channels and alphabet are derived. Kernel and
  // block count are shared by both models.
  int tcae_groups = 8;
  int tcae_importance_groups = 32;
  int tcae_kernel = 5;
  int tcae_blocks = 3;

  void Validate() const;
  // n channels, alphabet T + 1.
  TcaeConfig CodeTcae() const;
  // One channel, alphabet L.
  TcaeConfig ImportanceTcae() const;
};

struct ModelBundle {
  ModelConfig config;
  CwicNetworks nets;
  QuantizerParams quantizer;
  Tcae code_model;
  Tcae importance_model;
  // Identifier written into every bitstream; set by FinalizeModel and
  // LoadModel.
  ModelDigest digest{};

  // Zero-initialized parameters.
  static ModelBundle Build(const ModelConfig& config);
  static ModelBundle Random(const ModelConfig& config, std::mt19937_64& rng);

  // Every serialized array in manifest order.
  std::vector<ParamRef> Params();
  void CheckConsistent() const;
};

// Rounds every parameter to float precision (the file representation) and
// refreshes the digest, so the in-memory model codes exactly like a reloaded
// copy.
void FinalizeModel(ModelBundle& bundle);

}  // namespace cwic

#endif  // CWIC_MODEL_HPP_
