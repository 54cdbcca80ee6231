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

#include "cwic/model.hpp"

#include "cwic/container.hpp"
#include "cwic/error.hpp"

namespace cwic {

void ModelConfig::Validate() const {
  network.Validate();
  importance.Validate();
  if (importance.code_channels != network.code_channels) {
    ConfigError("importance config has n = " +
                std::to_string(importance.code_channels) +
                " but the network emits " +
                std::to_string(network.code_channels) + " channels");
  }
  if (quant_levels < 2 || quant_levels > 65535) {
    ConfigError("quantization levels T must be in [2, 65535], got " +
                std::to_string(quant_levels));
  }
  CodeTcae().Validate();
  ImportanceTcae().Validate();
}

TcaeConfig ModelConfig::CodeTcae() const {
  TcaeConfig c;
  c.channels = network.code_channels;
  c.alphabet = quant_levels + 1;
  c.groups = tcae_groups;
  c.kernel = tcae_kernel;
  c.residual_blocks = tcae_blocks;
  return c;
}

TcaeConfig ModelConfig::ImportanceTcae() const {
  TcaeConfig c = CodeTcae();
  c.channels = 1;
  c.alphabet = importance.levels;
  c.groups = tcae_importance_groups;
  return c;
}

ModelBundle ModelBundle::Build(const ModelConfig& config) {
  config.Validate();
  ModelBundle b;
  b.config = config;
  b.nets = CwicNetworks::Build(config.network);
  b.quantizer =
      QuantizerParams::Uniform(config.network.code_channels, config.quant_levels);
  b.code_model = Tcae(config.CodeTcae());
  b.importance_model = Tcae(config.ImportanceTcae());
  return b;
}

ModelBundle ModelBundle::Random(const ModelConfig& config,
                                std::mt19937_64& rng) {
  ModelBundle b = Build(config);
  b.nets = CwicNetworks::Random(config.network, rng);
  b.code_model = Tcae::Random(config.CodeTcae(), rng);
  b.importance_model = Tcae::Random(config.ImportanceTcae(), rng);
  return b;
}

std::vector<ParamRef> ModelBundle::Params() {
  std::vector<ParamRef> out = nets.Params();
  out.push_back({"quantizer.s",
                 {quantizer.num_channels(), quantizer.num_levels()},
                 &quantizer.weights()});
  CollectParams(code_model.net(), "tcae.code", out);
  CollectParams(importance_model.net(), "tcae.importance", out);
  return out;
}

void ModelBundle::CheckConsistent() const {
  config.Validate();
  if (quantizer.num_channels() != config.network.code_channels ||
      quantizer.num_levels() != config.quant_levels) {
    ConfigError("quantizer shape does not match the model config");
  }
  quantizer.Validate();
}

void FinalizeModel(ModelBundle& bundle) {
  for (ParamRef& ref : bundle.Params()) {
    for (double& v : *ref.values) v = static_cast<float>(v);
  }
  const std::vector<uint8_t> bytes = SaveModel(bundle);
  std::copy(bytes.end() - 16, bytes.end(), bundle.digest.begin());
}

}  // namespace cwic
