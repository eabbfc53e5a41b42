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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unin/numerics/tape.hpp"
#include "unin/numerics/tensor.hpp"
#include "unin/trajdata/scenario.hpp"
#include "unin/trajdata/stc_graph.hpp"

/// Hierarchical graph attention: category-level attention and the
/// distance-based agent kernel it modulates.
namespace unin::hga {

using numerics::Tensor;
using numerics::Var;

/// Slope of the LeakyReLU inside category attention.
inline constexpr double kAttentionSlope = 0.2;

/// Padded member features for every category at one time step.
struct CategoryInputs {
  Tensor features;                 // C x (2 * max_members), zero rows for absent categories
  std::vector<bool> present;       // C
};

/// Member (x, y) relative to the centroid of all present agents, divided by
/// `coord_scale`, padded to `max_members` slots in ascending agent_id order.
/// Throws PadError when a category has more than `max_members` members.
CategoryInputs category_inputs(const trajdata::STCGraph& graph, const trajdata::Scenario& scenario,
                               int t, std::size_t max_members, double coord_scale);

// Differentiable building blocks.

/// h = features * W_e, one row per category.
Var embed_categories(Var features, Var w_e);

/// Score vectors for every ordered pair (c1, c2), row c1 * C + c2:
/// leaky_relu([h_c1, h_c2] * mu). `mu` is (2 d_e) x d_a.
Var category_attention(Var h, Var mu);

/// Same, with one weight matrix per ordered pair (row-major pair order).
Var category_attention(Var h, const std::vector<Var>& mu_per_pair);

/// Row-wise max over the d_a entries: C^2 x 1.
Var category_importance(Var scores);

/// Softmax over all C^2 ordered pairs, restricted to pairs whose categories
/// are both present. Returns C x C.
Var normalize_category_interaction(Var importance, const std::vector<bool>& category_present);

/// out[i, j] = m[cat(i), cat(j)]. Throws MembershipError for categories
/// outside [0, C).
Var expand_to_agents(Var m_cat, const std::vector<int>& membership);

/// Entrywise product. Throws ShapeError on mismatch.
Var agent_attention(Var r, Var a_expanded);

// Value-level forms.

Tensor embed_categories(const Tensor& features, const Tensor& w_e);
Tensor category_attention(const Tensor& h, const Tensor& mu);
Tensor category_importance(const Tensor& scores);
Tensor normalize_category_interaction(const Tensor& importance, const std::vector<bool>& category_present);
Tensor normalize_category_interaction(const Tensor& importance);
Tensor expand_to_agents(const Tensor& m_cat, const std::vector<int>& membership);
Tensor agent_attention(const Tensor& r, const Tensor& a_expanded);

/// E[i, j] = 1 / |p_i - p_j| for distinct nonzero distances, else 0. Agents
/// with present[i] == false get zero rows and columns.
Tensor distance_kernel(const std::vector<trajdata::Vec2>& positions,
                       const std::vector<bool>* present = nullptr);

/// R = L^-1/2 (E + I) L^-1/2 with L the degree matrix of E + I.
Tensor laplacian_normalize(const Tensor& e);

/// One time step of the interaction chain, for inspection.
struct StepDiagnostics {
  int t = 0;
  Tensor e, r, scores, ci, att, h, f;
};

nlohmann::json to_json(const Tensor& t);
nlohmann::json to_json(const std::vector<StepDiagnostics>& steps);

}  // namespace unin::hga
