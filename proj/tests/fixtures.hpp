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

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "unin/numerics/params.hpp"
#include "unin/numerics/random.hpp"
#include "unin/numerics/tape.hpp"
#include "unin/predictor/config.hpp"
#include "unin/trajdata/scenario.hpp"

namespace unin::testing {

using numerics::GradMap;
using numerics::ParamSet;
using numerics::Tensor;
using numerics::Var;

inline Tensor random_tensor(numerics::Shape shape, numerics::Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

/// Worst relative error between analytic and finite-difference gradients.
/// `abs_floor` bounds the denominator from below, so entries whose gradient
/// is smaller than the floor are compared on an absolute scale.
inline double max_rel_error(const GradMap& analytic, const GradMap& numeric, double abs_floor = 1e-6) {
  double worst = 0.0;
  for (const auto& [name, g] : numeric) {
    const Tensor& a = analytic.at(name);
    for (std::size_t i = 0; i < g.numel(); ++i) {
      const double diff = std::abs(a[i] - g[i]);
      const double denom = std::max({std::abs(a[i]), std::abs(g[i]), abs_floor});
      worst = std::max(worst, diff / denom);
    }
  }
  return worst;
}

using ScalarBuilder = std::function<Var(numerics::Tape&, const std::map<std::string, Var>&)>;

inline GradMap analytic_grad(const ParamSet& params, const ScalarBuilder& build) {
  numerics::Tape tape;
  const auto bound = tape.bind(params);
  return tape.backward(build(tape, bound));
}

inline double scalar_value(const ParamSet& params, const ScalarBuilder& build) {
  numerics::Tape tape;
  const auto bound = tape.bind(params);
  return build(tape, bound).item();
}

/// Analytic versus central differences for a scalar built on a tape.
inline double gradient_error(const ParamSet& params, const ScalarBuilder& build, double eps = 1e-6) {
  const GradMap analytic = analytic_grad(params, build);
  const GradMap numeric =
      numerics::finite_difference_grad([&](const ParamSet& p) { return scalar_value(p, build); }, params, eps);
  return max_rel_error(analytic, numeric);
}

inline trajdata::AgentTrack straight_track(std::int64_t id, int category, trajdata::Vec2 start,
                                           trajdata::Vec2 step, int frames) {
  trajdata::AgentTrack tr;
  tr.agent_id = id;
  tr.category = category;
  for (int f = 0; f < frames; ++f) {
    tr.positions.push_back(start + step * static_cast<double>(f));
    tr.present.push_back(true);
  }
  return tr;
}

/// Three agents in two categories, t_obs 4 and t_pred 6, with one gently
/// curving so the constant-velocity origin is not exact.
inline trajdata::Scenario three_agent_scenario() {
  trajdata::Scenario sc;
  sc.t_obs = 4;
  sc.t_pred = 6;
  sc.frame_dt = 0.5;
  sc.categories = {"a", "b"};
  sc.tracks.push_back(straight_track(1, 0, {0.0, 0.0}, {1.0, 0.1}, 6));
  sc.tracks.push_back(straight_track(2, 1, {2.0, 3.0}, {-0.4, 0.3}, 6));
  trajdata::AgentTrack curved = straight_track(5, 0, {-1.0, 2.0}, {0.6, -0.2}, 6);
  for (int f = 0; f < 6; ++f) curved.positions[f].y += 0.05 * f * f;
  sc.tracks.push_back(curved);
  return sc;
}

/// A small model matching three_agent_scenario.
inline predictor::ModelConfig tiny_config() {
  predictor::ModelConfig c;
  c.d_e = 3;
  c.d_a = 2;
  c.gcn_channels = 4;
  c.gcn_layers = 1;
  c.tcn_kernel = 3;
  c.k = 3;
  c.uni_repeats = 2;
  c.mixtures = 2;
  c.t_obs = 4;
  c.t_pred = 6;
  c.categories = {"a", "b"};
  c.max_members = 3;
  c.seed = 11;
  return c;
}

}  // namespace unin::testing
