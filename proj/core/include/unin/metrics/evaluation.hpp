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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unin/metrics/metrics.hpp"
#include "unin/numerics/params.hpp"
#include "unin/predictor/config.hpp"
#include "unin/trajdata/scenario.hpp"

namespace unin::metrics {

struct EvalOptions {
  /// 0 evaluates the deterministic mode; K draws best-of-K.
  std::size_t best_of = 0;
  std::uint64_t seed = 0;
  std::optional<CategoryWeights> weights;
  FdeDenominator fde_denominator = FdeDenominator::kAgents;
};

/// Scenario i is sampled with a stream derived from (seed, i).
MetricReport evaluate_model(const numerics::ParamSet& params, const predictor::ModelConfig& config,
                            const std::vector<trajdata::Scenario>& scenarios, const EvalOptions& options);

/// Constant-velocity extrapolation under protocol "constant-velocity".
MetricReport evaluate_baseline(const std::vector<trajdata::Scenario>& scenarios,
                               const std::vector<std::string>& categories, const EvalOptions& options);

struct AblationRow {
  int kernel = 0;
  double ade = 0.0;
  double fde = 0.0;
};

struct AblationResult {
  std::vector<AblationRow> rows;  // in the requested order
  int best_kernel = 0;            // argmin ADE, earliest row on ties
};

/// The kernel sizes compared by default.
std::vector<int> default_ablation_kernels();

/// Trains one model per kernel size with the shared seed and data, then
/// scores the deterministic mode on `eval_set`. `parallel` trains kernels on
/// separate threads; results do not depend on it. Training errors are
/// rethrown with the kernel size prepended.
AblationResult ablation_run(const std::vector<trajdata::Scenario>& train_set,
                            const std::vector<trajdata::Scenario>& eval_set, const predictor::ModelConfig& base,
                            const predictor::TrainConfig& train, const std::vector<int>& kernels,
                            bool parallel = false);

/// `kernel,ade,fde` with a header line.
std::string format_ablation_csv(const AblationResult& result);

}  // namespace unin::metrics
