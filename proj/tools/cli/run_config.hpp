// Copyright 2026 The UNIN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unin/metrics/metrics.hpp"
#include "unin/predictor/config.hpp"
#include "unin/trajdata/csv.hpp"

namespace unin::cli {

/// Everything a run reads from its `key = value` config file. Model and
/// training keys use the same names as their JSON forms.
struct RunConfig {
  predictor::ModelConfig model;
  predictor::TrainConfig train;
  std::string data;
  std::string out;
  std::array<double, 3> split = {0.6, 0.2, 0.2};
  int stride = 0;
  /// Category weights in model category order; empty selects the table
  /// defaults when the categories are the default three.
  std::vector<double> weights;

  trajdata::WindowOptions window() const;
  std::optional<metrics::CategoryWeights> category_weights() const;
};

/// Parses `key = value` lines with `#` comments. Throws ConfigError naming
/// the offending key or line. `warnings`, when given, receives the model
/// validation warnings.
RunConfig parse_run_config(std::string_view text, std::vector<std::string>* warnings = nullptr);

RunConfig load_run_config(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Every key with its resolved value, sorted by key. Parsing the result
/// gives back the same configuration.
std::string format_run_config(const RunConfig& config);

/// `0.2,0.58,0.22` style lists. Throws ConfigError on malformed numbers.
std::vector<double> parse_number_list(std::string_view text, std::string_view what);

/// Maps weights onto category names. Throws ConfigError on a count mismatch.
metrics::CategoryWeights weights_for(const std::vector<std::string>& categories, const std::vector<double>& weights);

}  // namespace unin::cli
