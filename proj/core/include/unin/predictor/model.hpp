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
#include <string>
#include <vector>

#include "unin/hga/hga.hpp"
#include "unin/numerics/params.hpp"
#include "unin/numerics/tape.hpp"
#include "unin/predictor/config.hpp"
#include "unin/predictor/gmm.hpp"
#include "unin/trajdata/scenario.hpp"

namespace unin::predictor {

using numerics::ParamSet;
using numerics::Tensor;
using numerics::Var;

/// Everything the forward pass needs from a scenario, precomputed as
/// constants. Agent order is scenario track order.
struct SceneInputs {
  std::size_t agents = 0;
  std::size_t steps = 0;  // future steps
  std::vector<int> membership;
  /// Agents present in at least one observed frame; only these are predicted.
  std::vector<bool> predictable;

  struct Step {
    std::vector<bool> present;
    Tensor e, r;                 // N x N distance kernel and its normalization
    Tensor pair_mask;            // N x N, 1 where both agents are present
    hga::CategoryInputs categories;
    Tensor node_features;        // N x node_features
  };
  std::vector<Step> observed;    // t_obs entries

  Tensor category_onehot;        // (steps * N) x C, rows step * N + agent
  Tensor origin_x, origin_y;     // (steps * N) x K, mean offsets in metres
  Tensor truth_x, truth_y;       // (steps * N) x K, replicated targets
  Tensor loss_mask;              // (steps * N) x 1

  Trajectories truth;            // [agent][step]
  StepMask mask;                 // [agent][step]
};

/// Throws ConfigError when the scenario horizons or category table disagree
/// with the model configuration, PadError when a category has more members
/// than max_members.
SceneInputs prepare_scene(const trajdata::Scenario& scenario, const ModelConfig& config);

/// Fresh parameters. `category_frequencies` seeds the optional pi bias.
ParamSet init_params(const ModelConfig& config, const std::vector<double>* category_frequencies = nullptr);

/// Raw head outputs for rows step * N + agent.
struct ForwardResult {
  Var ht;              // (steps * N) x channels temporal features
  Var logits;          // pi logits
  Var mu_x, mu_y;      // metres
  Var log_sx, log_sy;  // log of metres
  Var rho;
  Var one_minus_rho_sq;  // sech^2 of the pre-activation, positive even where tanh rounds to 1
};

ForwardResult forward(const std::map<std::string, Var>& params, const SceneInputs& scene,
                      const ModelConfig& config, std::vector<hga::StepDiagnostics>* diagnostics = nullptr);

// Individual stages, exposed for tests.

/// H = relu(H + F (H W)) per layer, starting from the lifted features.
Var gcn_forward(Var h0, Var f, const std::vector<Var>& layer_weights);

/// `per_step` holds t_obs matrices of N x channels. Returns (steps * N) x
/// channels, rows step * N + agent.
Var tcn_forward(const std::vector<Var>& per_step, Var kernel, Var bias, Var resize);

/// Sum over masked pairs of the negative log-likelihood.
Var nll_sum(const ForwardResult& out, const SceneInputs& scene);

/// Plain values of the forward result.
GMMParams to_gmm(const ForwardResult& out, const SceneInputs& scene, std::size_t components);

/// Convenience wrapper running a forward pass on a scratch tape.
GMMParams predict_gmm(const ParamSet& params, const ModelConfig& config, const SceneInputs& scene,
                      std::vector<hga::StepDiagnostics>* diagnostics = nullptr);

/// Value and gradient of the summed NLL.
struct LossAndGrad {
  NllResult nll;
  numerics::GradMap grads;
};
LossAndGrad loss_and_grad(const ParamSet& params, const ModelConfig& config, const SceneInputs& scene);

/// Summed NLL without gradients.
NllResult scene_nll(const ParamSet& params, const ModelConfig& config, const SceneInputs& scene);

/// Checks every parameter against the shapes `config` implies. Throws
/// CheckpointError on any mismatch.
void check_param_shapes(const ParamSet& params, const ModelConfig& config);

}  // namespace unin::predictor
