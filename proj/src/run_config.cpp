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

#include "cwic/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "cwic/container.hpp"
#include "cwic/error.hpp"

namespace cwic {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Trim(item));
  return out;
}

int ParseInt(const std::string& key, const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  }
  return out;
}

double ParseReal(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double out = std::stod(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  ConfigError("config key '" + key + "': '" + v + "' is not a number");
}

}  // namespace

const std::vector<std::string>& RunConfig::KnownKeys() {
  static const std::vector<std::string> keys = {
      "train_dir",     "model_out",      "metrics_out",   "n",
      "L",             "T",              "r",             "gamma",
      "xi",            "alpha",          "steps",         "pretrain_steps",
      "batch_size",    "lr",             "lr_schedule",   "patience",
      "quant_lr",      "loss",           "ms_ssim_scales", "seed",
      "stage_channels", "dense_convs",   "kernel",        "tcae_groups",
      "tcae_kernel",   "tcae_blocks",    "tcae_epochs",   "tcae_lr",
      "tcae_batch_size", "tcae_importance_groups",
  };
  return keys;
}

const std::vector<std::string>& RunConfig::RequiredKeys() {
  static const std::vector<std::string> keys = {
      "train_dir", "model_out", "n", "L", "T", "r", "gamma", "steps"};
  return keys;
}

void RunConfig::Set(const std::string& key, const std::string& value,
                    const std::string& where, bool allow_replace) {
  const auto& known = KnownKeys();
  if (std::find(known.begin(), known.end(), key) == known.end()) {
    ConfigError(where + ": unknown config key '" + key + "'");
  }
  if (!allow_replace && values_.count(key)) {
    ConfigError(where + ": config key '" + key + "' given twice");
  }
  values_[key] = value;
}

RunConfig RunConfig::Parse(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) {
      ConfigError(where + ": expected 'key = value'");
    }
    cfg.Set(Trim(t.substr(0, eq)), Trim(t.substr(eq + 1)), where, false);
  }
  return cfg;
}

RunConfig RunConfig::Load(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  return Parse(std::string(bytes.begin(), bytes.end()), path);
}

void RunConfig::Override(const std::vector<std::string>& assignments) {
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      ConfigError("override '" + a + "' is not key=value");
    }
    Set(Trim(a.substr(0, eq)), Trim(a.substr(eq + 1)), "override", true);
  }
}

const std::string& RunConfig::Raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    ConfigError("missing required config key '" + key + "'");
  }
  return it->second;
}

std::string RunConfig::Str(const std::string& key,
                           const std::string& fallback) const {
  return Has(key) ? Raw(key) : fallback;
}

int RunConfig::Int(const std::string& key, int fallback) const {
  return Has(key) ? ParseInt(key, Raw(key)) : fallback;
}

double RunConfig::Real(const std::string& key, double fallback) const {
  return Has(key) ? ParseReal(key, Raw(key)) : fallback;
}

std::vector<int> RunConfig::IntList(const std::string& key,
                                    const std::vector<int>& fallback) const {
  if (!Has(key)) return fallback;
  std::vector<int> out;
  for (const std::string& s : SplitList(Raw(key))) out.push_back(ParseInt(key, s));
  return out;
}

std::vector<double> RunConfig::RealList(
    const std::string& key, const std::vector<double>& fallback) const {
  if (!Has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& s : SplitList(Raw(key))) {
    out.push_back(ParseReal(key, s));
  }
  return out;
}

void RunConfig::RequireTrainingKeys() const {
  for (const std::string& key : RequiredKeys()) Raw(key);
}

TrainJob MakeTrainJob(const RunConfig& cfg) {
  cfg.RequireTrainingKeys();
  TrainJob job;
  job.train_dir = cfg.Raw("train_dir");
  job.model_out = cfg.Raw("model_out");
  job.metrics_out = cfg.Str("metrics_out", job.model_out + ".metrics.csv");

  ModelConfig& m = job.model;
  m.network.code_channels = cfg.Int("n", 0);
  m.network.stage_channels = cfg.IntList("stage_channels", {16, 24, 32});
  m.network.dense_convs = cfg.IntList("dense_convs", {2});
  m.network.kernel = cfg.Int("kernel", 3);
  m.importance.code_channels = m.network.code_channels;
  m.importance.levels = cfg.Int("L", 0);
  m.importance.rate = cfg.Real("r", 0.0);
  m.importance.gamma = cfg.Real("gamma", 0.0);
  m.importance.xi = cfg.Real("xi", m.importance.xi);
  m.importance.alpha = cfg.Real("alpha", m.importance.alpha);
  m.quant_levels = cfg.Int("T", 0);
  m.tcae_groups = cfg.Int("tcae_groups", m.tcae_groups);
  m.tcae_importance_groups =
      cfg.Int("tcae_importance_groups", m.tcae_importance_groups);
  m.tcae_kernel = cfg.Int("tcae_kernel", m.tcae_kernel);
  m.tcae_blocks = cfg.Int("tcae_blocks", m.tcae_blocks);
  m.Validate();

  TrainOptions& o = job.options;
  o.steps = cfg.Int("steps", 0);
  o.pretrain_steps = cfg.Int("pretrain_steps", 0);
  o.batch_size = cfg.Int("batch_size", o.batch_size);
  if (cfg.Has("lr_schedule")) {
    o.rates = cfg.RealList("lr_schedule", {});
  } else {
    const double lr = cfg.Real("lr", 1e-4);
    o.rates = {lr, lr / 10, lr / 100};
  }
  if (o.rates.empty()) ConfigError("config key 'lr_schedule' is empty");
  for (double r : o.rates) {
    if (!(r > 0.0)) ConfigError("learning rates must be > 0");
  }
  o.patience = cfg.Int("patience", o.patience);
  o.quant_lr = cfg.Real("quant_lr", o.rates.front());
  const std::string loss = cfg.Str("loss", "mse");
  if (loss == "mse") {
    o.loss = DistortionLoss::kMse;
  } else if (loss == "msssim") {
    o.loss = DistortionLoss::kMsSsim;
  } else {
    ConfigError("config key 'loss': expected mse or msssim, got '" + loss + "'");
  }
  o.ms_ssim.scales = cfg.Int("ms_ssim_scales", o.ms_ssim.scales);
  const int seed = cfg.Int("seed", 1);
  if (seed < 0) ConfigError("config key 'seed' must be >= 0");
  o.seed = static_cast<uint64_t>(seed);
  o.tcae.epochs = cfg.Int("tcae_epochs", o.tcae.epochs);
  o.tcae.batch_size = cfg.Int("tcae_batch_size", o.tcae.batch_size);
  if (cfg.Has("tcae_lr")) {
    const double lr = cfg.Real("tcae_lr", 0.0);
    o.tcae.rates = {lr, lr / 3, lr / 9, lr / 27};
  }
  o.tcae.seed = o.seed + 1;
  if (o.steps < 0 || o.pretrain_steps < 0 || o.batch_size < 1 ||
      o.patience < 1 || o.tcae.epochs < 0 || o.tcae.batch_size < 1) {
    ConfigError("step, epoch, batch and patience settings must be positive");
  }
  return job;
}

const char* MetricsCsvHeader() {
  return "step,phase,l_d,l_r,l_quant,mask_sum,bpp_estimate,lr,reinit";
}

std::string MetricsCsvRow(const StepMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%lld,%s,%.9g,%.9g,%.9g,%.6g,%.6g,%.3g,%d",
                static_cast<long long>(m.step),
                m.pretrain ? "pretrain" : "main", m.distortion, m.rate_loss,
                m.quant_loss, m.mask_sum, m.bpp_estimate, m.learning_rate,
                m.reinitialized);
  return buf;
}

}  // namespace cwic
