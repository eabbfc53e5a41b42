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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "unin/predictor/gmm.hpp"
#include "unin/trajdata/scenario.hpp"

namespace unin::metrics {

using predictor::SampleSet;
using predictor::StepMask;
using predictor::Trajectories;
using trajdata::Vec2;

enum class FdeDenominator {
  kAgents,          // mean over agents present at the final step
  kAgentsTimesSteps  // the literal N * T_p reading
};

/// Mean L2 error over masked (agent, step) pairs. Throws EmptyDatasetError
/// when the mask is empty.
double ade(const Trajectories& pred, const Trajectories& truth, const StepMask& mask);

/// Final-step L2 error averaged over agents present at the final step.
/// Throws EmptyDatasetError when none is.
double fde(const Trajectories& pred, const Trajectories& truth, const StepMask& mask,
           FdeDenominator denominator = FdeDenominator::kAgents);

struct CategoryMetric {
  double ade = 0.0;
  double fde = 0.0;
  std::size_t pairs = 0;   // masked (agent, step) pairs
  std::size_t finals = 0;  // agents present at the final step
};

using CategoryWeights = std::map<std::string, double>;

/// Table weights for vehicle, pedestrian, cyclist.
CategoryWeights default_category_weights();

/// Weighted ADE and FDE with weights renormalized over the categories that
/// have data. Throws ConfigError when such a category has no weight.
std::pair<double, double> weighted_metrics(const std::map<std::string, CategoryMetric>& per_category,
                                           const CategoryWeights& weights);

/// Per agent, the sample with the smallest summed error over its masked
/// steps; ties keep the earlier sample.
Trajectories select_best_of_k(const SampleSet& samples, const Trajectories& truth, const StepMask& mask);

struct BestOfK {
  double ade = 0.0;
  double fde = 0.0;
};

/// ADE and FDE of the per-agent min-ADE sample.
BestOfK best_of_k(const SampleSet& samples, const Trajectories& truth, const StepMask& mask);

/// Repeats p_T + (p_T - p_{T-1}) * s for s = 1..steps per agent. A single
/// observed frame holds its position.
Trajectories constant_velocity_baseline(const Trajectories& observed, std::size_t steps);

/// The same extrapolation on a scenario, from each agent's last observed
/// present frame. Agents never observed yield zeros and should be masked.
Trajectories constant_velocity_baseline(const trajdata::Scenario& scenario);

/// Future positions of a scenario and the evaluation mask (present at the
/// frame and observed at least once).
std::pair<Trajectories, StepMask> future_truth(const trajdata::Scenario& scenario);

struct MetricReport {
  std::string protocol;
  double ade = 0.0;
  double fde = 0.0;
  std::map<std::string, CategoryMetric> per_category;
  std::optional<double> wade;
  std::optional<double> wfde;
  std::size_t pairs = 0;
  std::size_t finals = 0;
  std::size_t scenarios = 0;
};

nlohmann::json to_json(const MetricReport& report);

/// Pools errors across scenarios and categories.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(std::vector<std::string> categories);

  void add(const Trajectories& pred, const Trajectories& truth, const StepMask& mask,
           const std::vector<int>& membership);

  std::size_t pairs() const { return pairs_; }

  /// Throws EmptyDatasetError when nothing was accumulated.
  MetricReport report(std::string protocol, const std::optional<CategoryWeights>& weights = std::nullopt,
                      FdeDenominator denominator = FdeDenominator::kAgents) const;

 private:
  struct Totals {
    double ade_sum = 0.0;
    std::size_t pairs = 0;
    double fde_sum = 0.0;
    std::size_t finals = 0;
  };
  std::vector<std::string> categories_;
  std::vector<Totals> per_category_;
  std::size_t pairs_ = 0;
  std::size_t scenarios_ = 0;
  std::size_t steps_ = 0;
};

std::string deterministic_protocol();
std::string best_of_protocol(std::size_t k);

}  // namespace unin::metrics
