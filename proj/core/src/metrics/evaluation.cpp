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

#include "unin/metrics/evaluation.hpp"

#include <exception>
#include <thread>

#include <fmt/format.h>

#include "unin/errors.hpp"
#include "unin/numerics/checkpoint.hpp"
#include "unin/numerics/random.hpp"
#include "unin/predictor/model.hpp"
#include "unin/predictor/train.hpp"

namespace unin::metrics {

MetricReport evaluate_model(const numerics::ParamSet& params, const predictor::ModelConfig& config,
                            const std::vector<trajdata::Scenario>& scenarios, const EvalOptions& options) {
  MetricAccumulator acc(config.categories);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const predictor::SceneInputs scene = predictor::prepare_scene(scenarios[i], config);
    const predictor::GMMParams gmm = predictor::predict_gmm(params, config, scene);
    Trajectories pred;
    if (options.best_of == 0) {
      pred = predictor::predict_deterministic(gmm);
    } else {
      const SampleSet samples =
          predictor::sample_trajectories(gmm, options.best_of, numerics::derive_seed(options.seed, i));
      pred = select_best_of_k(samples, scene.truth, scene.mask);
    }
    acc.add(pred, scene.truth, scene.mask, scene.membership);
  }
  const std::string protocol = options.best_of == 0 ? deterministic_protocol() : best_of_protocol(options.best_of);
  return acc.report(protocol, options.weights, options.fde_denominator);
}

MetricReport evaluate_baseline(const std::vector<trajdata::Scenario>& scenarios,
                               const std::vector<std::string>& categories, const EvalOptions& options) {
  MetricAccumulator acc(categories);
  for (const trajdata::Scenario& sc : scenarios) {
    const auto [truth, mask] = future_truth(sc);
    std::vector<int> membership;
    for (const trajdata::AgentTrack& tr : sc.tracks) membership.push_back(tr.category);
    acc.add(constant_velocity_baseline(sc), truth, mask, membership);
  }
  return acc.report("constant-velocity", options.weights, options.fde_denominator);
}

std::vector<int> default_ablation_kernels() { return {1, 2, 3, 5, 10}; }

namespace {

AblationRow run_one(const std::vector<trajdata::Scenario>& train_set, const std::vector<trajdata::Scenario>& eval_set,
                    predictor::ModelConfig config, const predictor::TrainConfig& train, int kernel) {
  config.k = kernel;
  try {
    const predictor::TrainResult result = predictor::train(train_set, {}, config, train);
    const auto [ade, fde] = predictor::evaluate_deterministic(result.params, config, eval_set);
    return {kernel, ade, fde};
  } catch (const NumericError& e) {
    throw NumericError(fmt::format("kernel {}: {}", kernel, e.what()));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("kernel {}: {}", kernel, e.what()));
  }
}

}  // namespace

AblationResult ablation_run(const std::vector<trajdata::Scenario>& train_set,
                            const std::vector<trajdata::Scenario>& eval_set, const predictor::ModelConfig& base,
                            const predictor::TrainConfig& train, const std::vector<int>& kernels, bool parallel) {
  if (kernels.empty()) throw ConfigError("ablation needs at least one kernel size");
  for (int k : kernels)
    if (k < 1) throw ConfigError(fmt::format("kernel size {} must be at least 1", k));
  AblationResult out;
  out.rows.resize(kernels.size());
  if (parallel) {
    std::vector<std::exception_ptr> errors(kernels.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < kernels.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          out.rows[i] = run_one(train_set, eval_set, base, train, kernels[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (std::thread& w : workers) w.join();
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::size_t i = 0; i < kernels.size(); ++i) out.rows[i] = run_one(train_set, eval_set, base, train, kernels[i]);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (out.rows[i].ade < out.rows[best].ade) best = i;
  out.best_kernel = out.rows[best].kernel;
  return out;
}

std::string format_ablation_csv(const AblationResult& result) {
  std::string out = "kernel,ade,fde\n";
  for (const AblationRow& r : result.rows) {
    out += fmt::format("{},{},{}\n", r.kernel, numerics::format_double17(r.ade), numerics::format_double17(r.fde));
  }
  return out;
}

}  // namespace unin::metrics
