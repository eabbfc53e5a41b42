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
#include <cstdint>
#include <vector>

#include "unin/numerics/tensor.hpp"
#include "unin/trajdata/scenario.hpp"

namespace unin::predictor {

using trajdata::Vec2;

/// [agent][step] positions.
using Trajectories = std::vector<std::vector<Vec2>>;
/// [agent][step] validity.
using StepMask = std::vector<std::vector<bool>>;

/// Bivariate Gaussian mixture per (agent, future step).
struct GMMParams {
  std::size_t agents = 0;
  std::size_t steps = 0;
  std::size_t components = 0;
  std::vector<double> pi, mu_x, mu_y, sigma_x, sigma_y, rho;

  GMMParams() = default;
  GMMParams(std::size_t agents, std::size_t steps, std::size_t components);

  std::size_t index(std::size_t agent, std::size_t step, std::size_t k) const {
    return (agent * steps + step) * components + k;
  }
  /// Throws ContractError unless every mixture is valid.
  void validate() const;
};

/// Squashes raw head outputs. `raw` has one row per (step, agent), row
/// step * agents + agent, and 6K columns laid out as blocks of K:
/// pi logits, mu_x, mu_y, log sigma_x, log sigma_y, pre-tanh rho.
GMMParams gmm_head(const numerics::Tensor& raw, std::size_t agents, std::size_t steps, std::size_t components);

/// log N((x, y) | mu, sigma, rho) for a bivariate normal.
double log_density(Vec2 x, double mu_x, double mu_y, double sigma_x, double sigma_y, double rho);

struct NllResult {
  double sum = 0.0;
  std::size_t count = 0;
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

/// -sum over masked (agent, step) of log sum_k pi_k N(truth | k). Throws
/// EmptyDatasetError when nothing is masked in.
NllResult nll_loss(const GMMParams& params, const Trajectories& truth, const StepMask& mask);

/// [sample][agent][step].
using SampleSet = std::vector<Trajectories>;

/// Draws a component from pi, then a correlated pair
/// (mu_x + sx z1, mu_y + sy (rho z1 + sqrt(1 - rho^2) z2)).
SampleSet sample_trajectories(const GMMParams& params, std::size_t num_samples, std::uint64_t seed);

/// Mean of the highest-weight component per step; ties go to the lower index.
Trajectories predict_deterministic(const GMMParams& params);

}  // namespace unin::predictor
