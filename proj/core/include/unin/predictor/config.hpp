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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unin/trajdata/scenario.hpp"
#include "unin/uni/uni.hpp"

namespace unin::predictor {

struct ModelConfig {
  int d_e = 8;
  int d_a = 8;
  int gcn_layers = 1;
  int gcn_channels = 16;
  int tcn_kernel = 3;
  int k = 3;  // UNI kernel size
  int uni_repeats = 2;
  int mixtures = 3;
  int t_obs = 4;
  int t_pred = 10;
  double frame_dt = 0.5;
  std::uint64_t seed = 0;
  std::vector<std::string> categories = trajdata::default_categories();
  int max_members = 16;
  /// Metres per model unit for positions fed to, and offsets read from, the
  /// network.
  double coord_scale = 5.0;
  uni::ConvAxis uni_axis = uni::ConvAxis::kRow;
  bool mu_per_pair = false;
  bool pi_category_bias = false;
  /// Predict means as offsets from constant-velocity extrapolation instead
  /// of from the last observed position.
  bool cv_residual = true;
  /// Lower bound on predicted scales, metres. Keeps the likelihood bounded
  /// for agents the origin already predicts exactly.
  double sigma_floor = 0.05;

  int future_steps() const { return t_pred - t_obs; }
  std::size_t category_count() const { return categories.size(); }
  /// Per-agent node features: relative position, velocity, category one-hot.
  std::size_t node_features() const { return 4 + categories.size(); }

  bool operator==(const ModelConfig&) const = default;
};

/// Throws ConfigError for invalid values. Returns non-fatal warnings.
std::vector<std::string> validate(const ModelConfig& config);

nlohmann::json to_json(const ModelConfig& config);
/// Missing keys keep their defaults; unknown keys throw ConfigError.
ModelConfig model_config_from_json(const nlohmann::json& doc);

struct TrainConfig {
  double lr = 0.005;
  double lr_decay = 0.2;
  int lr_decay_every = 10;
  double momentum = 0.0;
  int epochs = 50;
  /// Joint gradient L2 norm cap per step; 0 disables clipping.
  double grad_clip = 5.0;

  bool operator==(const TrainConfig&) const = default;
};

void validate(const TrainConfig& config);
nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& doc);

}  // namespace unin::predictor
