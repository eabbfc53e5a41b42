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

#include "unin/hga/hga.hpp"

#include <cmath>
#include <string>

#include "unin/errors.hpp"

namespace unin::hga {

namespace nm = unin::numerics;

CategoryInputs category_inputs(const trajdata::STCGraph& graph, const trajdata::Scenario& scenario,
                               int t, std::size_t max_members, double coord_scale) {
  const std::size_t n_cat = scenario.category_count();
  trajdata::Vec2 centroid{0.0, 0.0};
  const auto& nodes = graph.agent_nodes.at(t);
  for (const trajdata::AgentNode& node : nodes) centroid = centroid + node.position;
  if (!nodes.empty()) centroid = centroid * (1.0 / static_cast<double>(nodes.size()));

  CategoryInputs out{Tensor({n_cat, 2 * max_members}), std::vector<bool>(n_cat, false)};
  for (const trajdata::CategoryNode& node : graph.category_nodes.at(t)) {
    std::vector<std::vector<double>> rows;
    for (std::size_t agent : node.members) {
      const trajdata::Vec2 rel = (scenario.tracks[agent].positions[t] - centroid) * (1.0 / coord_scale);
      rows.push_back({rel.x, rel.y});
    }
    const trajdata::Padded padded = trajdata::pad_to(max_members, rows, 2);
    const auto c = static_cast<std::size_t>(node.category);
    for (std::size_t j = 0; j < 2 * max_members; ++j) out.features(c, j) = padded.block[j];
    out.present[c] = true;
  }
  return out;
}

namespace {

// Selects row c1 (first) or c2 (second) of h for every ordered pair.
Tensor pair_selector(std::size_t n_cat, bool first) {
  Tensor s({n_cat * n_cat, n_cat});
  for (std::size_t c1 = 0; c1 < n_cat; ++c1)
    for (std::size_t c2 = 0; c2 < n_cat; ++c2) s(c1 * n_cat + c2, first ? c1 : c2) = 1.0;
  return s;
}

Var pair_concat(Var h) {
  nm::Tape& tape = *h.tape();
  const std::size_t n_cat = h.rows();
  Var left = nm::matmul(tape.constant(pair_selector(n_cat, true)), h);
  Var right = nm::matmul(tape.constant(pair_selector(n_cat, false)), h);
  return nm::concat({left, right}, 1);
}

Tensor one_hot_membership(const std::vector<int>& membership, std::size_t n_cat) {
  if (membership.empty()) throw ShapeError("expand_to_agents: no agents");
  Tensor p({membership.size(), n_cat});
  for (std::size_t i = 0; i < membership.size(); ++i) {
    const int c = membership[i];
    if (c < 0 || static_cast<std::size_t>(c) >= n_cat) {
      throw MembershipError("agent " + std::to_string(i) + " has category " + std::to_string(c) +
                            " outside [0, " + std::to_string(n_cat) + ")");
    }
    p(i, static_cast<std::size_t>(c)) = 1.0;
  }
  return p;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " + nm::to_string(a.shape()) + " and " +
                     nm::to_string(b.shape()) + " differ");
  }
}

}  // namespace

Var embed_categories(Var features, Var w_e) { return nm::matmul(features, w_e); }

Var category_attention(Var h, Var mu) {
  if (mu.rows() != 2 * h.cols()) {
    throw ShapeError("category_attention: mu " + nm::to_string(mu.shape()) + " does not accept pairs of " +
                     nm::to_string(h.shape()));
  }
  return nm::leaky_relu(nm::matmul(pair_concat(h), mu), kAttentionSlope);
}

Var category_attention(Var h, const std::vector<Var>& mu_per_pair) {
  const std::size_t pairs = h.rows() * h.rows();
  if (mu_per_pair.size() != pairs) {
    throw ShapeError("category_attention: expected " + std::to_string(pairs) + " pair weights, got " +
                     std::to_string(mu_per_pair.size()));
  }
  Var concat = pair_concat(h);
  std::vector<Var> rows;
  rows.reserve(pairs);
  for (std::size_t p = 0; p < pairs; ++p) {
    if (mu_per_pair[p].rows() != 2 * h.cols()) {
      throw ShapeError("category_attention: pair weight " + nm::to_string(mu_per_pair[p].shape()) +
                       " does not accept pairs of " + nm::to_string(h.shape()));
    }
    rows.push_back(nm::matmul(nm::slice(concat, 0, p, p + 1), mu_per_pair[p]));
  }
  return nm::leaky_relu(nm::concat(rows, 0), kAttentionSlope);
}

Var category_importance(Var scores) { return nm::max_reduce(scores, 1); }

Var normalize_category_interaction(Var importance, const std::vector<bool>& category_present) {
  const std::size_t n_cat = category_present.size();
  if (importance.value().numel() != n_cat * n_cat) {
    throw ShapeError("normalize_category_interaction: " + std::to_string(n_cat) +
                     " categories need " + std::to_string(n_cat * n_cat) + " importance scalars, got " +
                     nm::to_string(importance.shape()));
  }
  std::vector<bool> pair_mask(n_cat * n_cat);
  for (std::size_t c1 = 0; c1 < n_cat; ++c1)
    for (std::size_t c2 = 0; c2 < n_cat; ++c2)
      pair_mask[c1 * n_cat + c2] = category_present[c1] && category_present[c2];
  Var flat = nm::reshape(importance, {n_cat * n_cat});
  return nm::reshape(nm::softmax(flat, 0, &pair_mask), {n_cat, n_cat});
}

Var expand_to_agents(Var m_cat, const std::vector<int>& membership) {
  if (m_cat.value().rank() != 2 || m_cat.rows() != m_cat.cols()) {
    throw ShapeError("expand_to_agents: category matrix must be square, got " + nm::to_string(m_cat.shape()));
  }
  nm::Tape& tape = *m_cat.tape();
  const Tensor p = one_hot_membership(membership, m_cat.rows());
  Var pv = tape.constant(p);
  return nm::matmul(nm::matmul(pv, m_cat), nm::transpose(pv));
}

Var agent_attention(Var r, Var a_expanded) {
  require_same_shape(r.value(), a_expanded.value(), "agent_attention");
  return nm::mul(r, a_expanded);
}

Tensor embed_categories(const Tensor& features, const Tensor& w_e) { return nm::eval::matmul(features, w_e); }

Tensor category_attention(const Tensor& h, const Tensor& mu) {
  nm::Tape tape;
  return category_attention(tape.constant(h), tape.constant(mu)).value();
}

Tensor category_importance(const Tensor& scores) { return nm::eval::max_reduce(scores, 1); }

Tensor normalize_category_interaction(const Tensor& importance, const std::vector<bool>& category_present) {
  nm::Tape tape;
  return normalize_category_interaction(tape.constant(importance), category_present).value();
}

Tensor normalize_category_interaction(const Tensor& importance) {
  const auto n_cat = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(importance.numel()))));
  if (n_cat * n_cat != importance.numel()) {
    throw ShapeError("normalize_category_interaction: " + std::to_string(importance.numel()) +
                     " scalars is not a square pair count");
  }
  return normalize_category_interaction(importance, std::vector<bool>(n_cat, true));
}

Tensor expand_to_agents(const Tensor& m_cat, const std::vector<int>& membership) {
  nm::Tape tape;
  return expand_to_agents(tape.constant(m_cat), membership).value();
}

Tensor agent_attention(const Tensor& r, const Tensor& a_expanded) {
  require_same_shape(r, a_expanded, "agent_attention");
  Tensor out = r;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= a_expanded[i];
  return out;
}

Tensor distance_kernel(const std::vector<trajdata::Vec2>& positions, const std::vector<bool>* present) {
  const std::size_t n = positions.size();
  if (n == 0) throw ShapeError("distance_kernel: no agents");
  if (present && present->size() != n) throw ShapeError("distance_kernel: mask length differs from agent count");
  Tensor e({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    if (present && !(*present)[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (present && !(*present)[j]) continue;
      const double d = trajdata::distance(positions[i], positions[j]);
      const double v = d > 0.0 ? 1.0 / d : 0.0;
      e(i, j) = v;
      e(j, i) = v;
    }
  }
  return e;
}

Tensor laplacian_normalize(const Tensor& e) {
  if (e.rank() != 2 || e.rows() != e.cols()) {
    throw ShapeError("laplacian_normalize: expected a square matrix, got " + nm::to_string(e.shape()));
  }
  const std::size_t n = e.rows();
  std::vector<double> inv_sqrt_degree(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;
    for (std::size_t j = 0; j < n; ++j) s += e(i, j);
    inv_sqrt_degree[i] = 1.0 / std::sqrt(s);
  }
  Tensor r({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double e_hat = e(i, j) + (i == j ? 1.0 : 0.0);
      // The degree product is formed first so that R is exactly symmetric.
      r(i, j) = e_hat * (inv_sqrt_degree[i] * inv_sqrt_degree[j]);
    }
  return r;
}

nlohmann::json to_json(const Tensor& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < t.cols(); ++j) row.push_back(t.rank() == 1 ? t[j] : t(i, j));
    rows.push_back(std::move(row));
  }
  return t.rank() == 1 ? rows[0] : rows;
}

nlohmann::json to_json(const std::vector<StepDiagnostics>& steps) {
  nlohmann::json out = nlohmann::json::array();
  for (const StepDiagnostics& s : steps) {
    out.push_back({{"t", s.t},
                   {"E", to_json(s.e)},
                   {"R", to_json(s.r)},
                   {"A_scores", to_json(s.scores)},
                   {"CI", to_json(s.ci)},
                   {"ATT", to_json(s.att)},
                   {"h", to_json(s.h)},
                   {"F", to_json(s.f)}});
  }
  return out;
}

}  // namespace unin::hga
