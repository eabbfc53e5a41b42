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

#include "unin/predictor/config.hpp"

#include <cmath>
#include <set>

#include "unin/errors.hpp"

namespace unin::predictor {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

template <typename T>
void read(const nlohmann::json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& doc, const std::set<std::string>& known) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
  }
}

}  // namespace

std::vector<std::string> validate(const ModelConfig& c) {
  require(c.d_e >= 1, "d_e must be at least 1");
  require(c.d_a >= 1, "d_a must be at least 1");
  require(c.gcn_layers >= 0, "gcn_layers must be non-negative");
  require(c.gcn_channels >= 1, "gcn_channels must be at least 1");
  require(c.tcn_kernel >= 1, "tcn_kernel must be at least 1");
  require(c.k >= 1, "k must be at least 1");
  require(c.uni_repeats >= 1, "uni_repeats must be at least 1");
  require(c.mixtures >= 1, "mixtures must be at least 1");
  require(c.t_obs >= 1, "t_obs must be positive");
  require(c.t_pred > c.t_obs, "t_pred must exceed t_obs");
  require(c.t_obs >= c.tcn_kernel, "t_obs (" + std::to_string(c.t_obs) + ") is shorter than tcn_kernel (" +
                                       std::to_string(c.tcn_kernel) + ")");
  require(std::isfinite(c.frame_dt) && c.frame_dt > 0.0, "frame_dt must be positive");
  require(!c.categories.empty(), "at least one category is required");
  require(c.max_members >= 1, "max_members must be at least 1");
  require(std::isfinite(c.coord_scale) && c.coord_scale > 0.0, "coord_scale must be positive");
  require(std::isfinite(c.sigma_floor) && c.sigma_floor >= 0.0, "sigma_floor must be non-negative");
  std::vector<std::string> warnings;
  if (c.gcn_layers != 1 && c.gcn_layers != 2) {
    warnings.push_back("gcn_layers = " + std::to_string(c.gcn_layers) +
                       " is outside the recommended range {1, 2}");
  }
  return warnings;
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"d_e", c.d_e},
          {"d_a", c.d_a},
          {"gcn_layers", c.gcn_layers},
          {"gcn_channels", c.gcn_channels},
          {"tcn_kernel", c.tcn_kernel},
          {"k", c.k},
          {"uni_repeats", c.uni_repeats},
          {"mixtures", c.mixtures},
          {"t_obs", c.t_obs},
          {"t_pred", c.t_pred},
          {"frame_dt", c.frame_dt},
          {"seed", c.seed},
          {"categories", c.categories},
          {"max_members", c.max_members},
          {"coord_scale", c.coord_scale},
          {"uni_axis", std::string(uni::axis_name(c.uni_axis))},
          {"mu_per_pair", c.mu_per_pair},
          {"pi_category_bias", c.pi_category_bias},
          {"cv_residual", c.cv_residual},
          {"sigma_floor", c.sigma_floor}};
}

ModelConfig model_config_from_json(const nlohmann::json& doc) {
  reject_unknown(doc, {"d_e", "d_a", "gcn_layers", "gcn_channels", "tcn_kernel", "k", "uni_repeats",
                       "mixtures", "t_obs", "t_pred", "frame_dt", "seed", "categories", "max_members",
                       "coord_scale", "uni_axis", "mu_per_pair", "pi_category_bias", "cv_residual", "sigma_floor"});
  ModelConfig c;
  read(doc, "d_e", c.d_e);
  read(doc, "d_a", c.d_a);
  read(doc, "gcn_layers", c.gcn_layers);
  read(doc, "gcn_channels", c.gcn_channels);
  read(doc, "tcn_kernel", c.tcn_kernel);
  read(doc, "k", c.k);
  read(doc, "uni_repeats", c.uni_repeats);
  read(doc, "mixtures", c.mixtures);
  read(doc, "t_obs", c.t_obs);
  read(doc, "t_pred", c.t_pred);
  read(doc, "frame_dt", c.frame_dt);
  read(doc, "seed", c.seed);
  read(doc, "categories", c.categories);
  read(doc, "max_members", c.max_members);
  read(doc, "coord_scale", c.coord_scale);
  std::string axis(uni::axis_name(c.uni_axis));
  read(doc, "uni_axis", axis);
  c.uni_axis = uni::parse_axis(axis);
  read(doc, "mu_per_pair", c.mu_per_pair);
  read(doc, "pi_category_bias", c.pi_category_bias);
  read(doc, "cv_residual", c.cv_residual);
  read(doc, "sigma_floor", c.sigma_floor);
  return c;
}

void validate(const TrainConfig& c) {
  require(std::isfinite(c.lr) && c.lr > 0.0, "lr must be positive");
  require(std::isfinite(c.lr_decay) && c.lr_decay > 0.0, "lr_decay must be positive");
  require(c.lr_decay_every >= 1, "lr_decay_every must be at least 1");
  require(std::isfinite(c.momentum) && c.momentum >= 0.0 && c.momentum < 1.0, "momentum must lie in [0, 1)");
  require(c.epochs >= 1, "epochs must be at least 1");
  require(std::isfinite(c.grad_clip) && c.grad_clip >= 0.0, "grad_clip must be non-negative");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"lr", c.lr},
          {"lr_decay", c.lr_decay},
          {"lr_decay_every", c.lr_decay_every},
          {"momentum", c.momentum},
          {"epochs", c.epochs},
          {"grad_clip", c.grad_clip}};
}

TrainConfig train_config_from_json(const nlohmann::json& doc) {
  reject_unknown(doc, {"lr", "lr_decay", "lr_decay_every", "momentum", "epochs", "grad_clip"});
  TrainConfig c;
  read(doc, "lr", c.lr);
  read(doc, "lr_decay", c.lr_decay);
  read(doc, "lr_decay_every", c.lr_decay_every);
  read(doc, "momentum", c.momentum);
  read(doc, "epochs", c.epochs);
  read(doc, "grad_clip", c.grad_clip);
  return c;
}

}  // namespace unin::predictor
