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
#include <utility>
#include <vector>

#include "unin/numerics/tensor.hpp"
#include "unin/trajdata/scenario.hpp"

namespace unin::trajdata {

struct AgentNode {
  std::size_t agent;  // index into Scenario::tracks
  Vec2 position;
  int category;
};

struct CategoryNode {
  int category;
  std::vector<std::size_t> members;  // agent indices, ascending agent_id
};

struct TemporalEdge {
  std::size_t agent;
  int t;  // links (agent, t) -> (agent, t + 1)
};

/// Spatio-temporal-category graph. Every per-step list is indexed by frame.
struct STCGraph {
  std::vector<std::vector<AgentNode>> agent_nodes;
  std::vector<TemporalEdge> temporal_edges;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> spatial_edges;
  std::vector<std::vector<CategoryNode>> category_nodes;
  std::vector<std::vector<std::pair<int, int>>> category_edges;
  std::vector<std::vector<std::pair<int, std::size_t>>> category_agent_edges;

  std::size_t frames() const { return agent_nodes.size(); }
  /// Members of `category` at frame t; empty if the category has no node.
  const std::vector<std::size_t>& members(int t, int category) const;
};

STCGraph build_stc_graph(const Scenario& scenario);

struct Padded {
  numerics::Tensor block;  // count x feature_dim
  std::vector<bool> mask;  // true for real rows
};

/// Zero-fills rows up to `count`. Throws PadError when count < rows.size()
/// and ShapeError for ragged rows.
Padded pad_to(std::size_t count, const std::vector<std::vector<double>>& rows, std::size_t feature_dim);

}  // namespace unin::trajdata
