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

#include "unin/predictor/train.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "unin/errors.hpp"
#include "unin/metrics/metrics.hpp"
#include "unin/numerics/checkpoint.hpp"
#include "unin/predictor/model.hpp"
#include "unin/trajdata/split.hpp"

namespace unin::predictor {

namespace {

// Separates the epoch-order stream from parameter initialisation.
constexpr std::uint64_t kOrderStream = 0x6f72646572ULL;

std::vector<double> category_frequencies(const std::vector<trajdata::Scenario>& scenarios, std::size_t n_cat) {
  std::vector<double> freq(n_cat, 0.0);
  double total = 0.0;
  for (const trajdata::Scenario& sc : scenarios)
    for (const trajdata::AgentTrack& tr : sc.tracks) {
      freq[static_cast<std::size_t>(tr.category)] += 1.0;
      total += 1.0;
    }
  if (total > 0.0)
    for (double& f : freq) f /= total;
  return freq;
}

}  // namespace

std::pair<double, double> evaluate_deterministic(const numerics::ParamSet& params, const ModelConfig& model,
                                                 const std::vector<trajdata::Scenario>& scenarios) {
  metrics::MetricAccumulator acc(model.categories);
  for (const trajdata::Scenario& sc : scenarios) {
    const SceneInputs scene = prepare_scene(sc, model);
    const Trajectories pred = predict_deterministic(predict_gmm(params, model, scene));
    acc.add(pred, scene.truth, scene.mask, scene.membership);
  }
  const metrics::MetricReport r = acc.report(metrics::deterministic_protocol());
  return {r.ade, r.fde};
}

TrainResult train(const std::vector<trajdata::Scenario>& train_set, const std::vector<trajdata::Scenario>& val_set,
                  const ModelConfig& model, const TrainConfig& options, const EpochCallback& on_epoch) {
  TrainResult result;
  result.warnings = validate(model);
  validate(options);
  if (train_set.empty()) throw EmptyDatasetError("training set is empty");

  std::vector<SceneInputs> scenes;
  for (const trajdata::Scenario& sc : train_set) {
    SceneInputs scene = prepare_scene(sc, model);
    double targets = 0.0;
    for (double v : scene.loss_mask.data()) targets += v;
    if (targets > 0.0) scenes.push_back(std::move(scene));
  }
  if (scenes.empty()) throw EmptyDatasetError("no training scenario has a future target");

  const std::vector<double> freq = category_frequencies(train_set, model.category_count());
  result.params = init_params(model, &freq);
  numerics::SgdOptimizer optimizer(options.momentum);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const double lr = numerics::lr_schedule(epoch, options.lr, options.lr_decay, options.lr_decay_every);
    const std::vector<std::size_t> order =
        trajdata::shuffled_indices(scenes.size(), numerics::derive_seed(model.seed ^ kOrderStream, epoch));
    NllResult total;
    for (std::size_t idx : order) {
      LossAndGrad lg;
      try {
        lg = loss_and_grad(result.params, model, scenes[idx]);
        if (!std::isfinite(lg.nll.sum)) throw NumericError("loss is not finite");
      } catch (const NumericError& e) {
        throw NumericError(fmt::format("training diverged at epoch {}, scenario {}: {}", epoch, idx, e.what()));
      }
      if (options.grad_clip > 0.0) numerics::clip_grad_norm(lg.grads, options.grad_clip);
      optimizer.step(result.params, lg.grads, lr);
      total.sum += lg.nll.sum;
      total.count += lg.nll.count;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_nll = total.mean();
    rec.val_ade = std::numeric_limits<double>::quiet_NaN();
    rec.val_fde = std::numeric_limits<double>::quiet_NaN();
    if (!val_set.empty()) {
      try {
        std::tie(rec.val_ade, rec.val_fde) = evaluate_deterministic(result.params, model, val_set);
      } catch (const EmptyDatasetError&) {
        // Validation scenarios without future targets leave the columns NaN.
      }
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

std::string format_history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,lr,train_nll,val_ade,val_fde\n";
  for (const EpochRecord& r : history) {
    out += fmt::format("{},{},{},{},{}\n", r.epoch, numerics::format_double17(r.lr),
                       numerics::format_double17(r.train_nll), numerics::format_double17(r.val_ade),
                       numerics::format_double17(r.val_fde));
  }
  return out;
}

std::string serialize_model(const numerics::ParamSet& params, const ModelConfig& model, const TrainConfig& train) {
  return numerics::serialize_checkpoint(params, {{"model", to_json(model)}, {"train", to_json(train)}});
}

LoadedModel parse_model(std::string_view text) {
  numerics::Checkpoint ckpt = numerics::parse_checkpoint(text);
  LoadedModel out;
  try {
    if (!ckpt.config.contains("model")) throw CheckpointError("checkpoint has no model configuration");
    out.model = model_config_from_json(ckpt.config.at("model"));
    if (ckpt.config.contains("train")) out.train = train_config_from_json(ckpt.config.at("train"));
    validate(out.model);
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint configuration: ") + e.what());
  }
  check_param_shapes(ckpt.params, out.model);
  out.params = std::move(ckpt.params);
  return out;
}

}  // namespace unin::predictor
