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

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "unin/numerics/params.hpp"
#include "unin/predictor/config.hpp"
#include "unin/trajdata/scenario.hpp"

namespace unin::predictor {

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_nll = 0.0;  // mean per (agent, step) over the epoch's pass
  double val_ade = 0.0;    // NaN without a validation set
  double val_fde = 0.0;
};

struct TrainResult {
  numerics::ParamSet params;
  std::vector<EpochRecord> history;
  std::vector<std::string> warnings;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// One scenario per step, visited in a seeded order that changes each
/// epoch. Throws EmptyDatasetError when no training scenario has a future
/// target and NumericError, annotated with epoch and scenario, when the loss
/// or a gradient stops being finite.
TrainResult train(const std::vector<trajdata::Scenario>& train_set, const std::vector<trajdata::Scenario>& val_set,
                  const ModelConfig& model, const TrainConfig& options, const EpochCallback& on_epoch = {});

/// Deterministic ADE and FDE over `scenarios`.
std::pair<double, double> evaluate_deterministic(const numerics::ParamSet& params, const ModelConfig& model,
                                                 const std::vector<trajdata::Scenario>& scenarios);

/// `epoch,lr,train_nll,val_ade,val_fde` with a header line.
std::string format_history_csv(const std::vector<EpochRecord>& history);

struct LoadedModel {
  ModelConfig model;
  TrainConfig train;
  numerics::ParamSet params;
};

std::string serialize_model(const numerics::ParamSet& params, const ModelConfig& model, const TrainConfig& train);
/// Throws CheckpointError on malformed input or parameters that do not fit
/// the embedded configuration.
LoadedModel parse_model(std::string_view text);

}  // namespace unin::predictor
