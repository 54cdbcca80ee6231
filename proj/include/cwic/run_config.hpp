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

#ifndef CWIC_RUN_CONFIG_HPP_
#define CWIC_RUN_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

#include "cwic/model.hpp"
#include "cwic/trainer.hpp"

namespace cwic {

// Parsed `key = value` lines. Blank lines and lines starting with '#' are
// skipped. Unknown and repeated keys are configuration errors.
class RunConfig {
 public:
  static RunConfig Parse(const std::string& text, const std::string& origin);
  static RunConfig Load(const std::string& path);

  // Applies "key=value" overrides (same key rules as the file).
  void Override(const std::vector<std::string>& assignments);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& Raw(const std::string& key) const;
  std::string Str(const std::string& key, const std::string& fallback) const;
  int Int(const std::string& key, int fallback) const;
  double Real(const std::string& key, double fallback) const;
  std::vector<int> IntList(const std::string& key,
                           const std::vector<int>& fallback) const;
  std::vector<double> RealList(const std::string& key,
                               const std::vector<double>& fallback) const;

  // Throws naming the first missing required key.
  void RequireTrainingKeys() const;

  static const std::vector<std::string>& KnownKeys();
  static const std::vector<std::string>& RequiredKeys();

 private:
  void Set(const std::string& key, const std::string& value,
           const std::string& where, bool allow_replace);

  std::map<std::string, std::string> values_;
};

struct TrainJob {
  std::string train_dir;
  std::string model_out;
  std::string metrics_out;
  ModelConfig model;
  TrainOptions options;
};

TrainJob MakeTrainJob(const RunConfig& config);

// Column header of the training metrics CSV.
const char* MetricsCsvHeader();
std::string MetricsCsvRow(const StepMetrics& m);

}  // namespace cwic

#endif  // CWIC_RUN_CONFIG_HPP_
