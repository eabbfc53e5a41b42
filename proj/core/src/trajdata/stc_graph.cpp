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

#include "unin/trajdata/stc_graph.hpp"

#include <string>

#include "unin/errors.hpp"

namespace unin::trajdata {

const std::vector<std::size_t>& STCGraph::members(int t, int category) const {
  static const std::vector<std::size_t> kNone;
  for (const CategoryNode& node : category_nodes.at(t))
    if (node.category == category) return node.members;
  return kNone;
}

STCGraph build_stc_graph(const Scenario& scenario) {
  validate(scenario);
  const int frames = scenario.t_pred;
  const int n_cat = static_cast<int>(scenario.category_count());
  STCGraph g;
  g.agent_nodes.resize(frames);
  g.spatial_edges.resize(frames);
  g.category_nodes.resize(frames);
  g.category_edges.resize(frames);
  g.category_agent_edges.resize(frames);

  for (int t = 0; t < frames; ++t) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < scenario.tracks.size(); ++i) {
      const AgentTrack& tr = scenario.tracks[i];
      if (!tr.present[t]) continue;
      present.push_back(i);
      g.agent_nodes[t].push_back({i, tr.positions[t], tr.category});
      if (t + 1 < frames && tr.present[t + 1]) g.temporal_edges.push_back({i, t});
    }
    for (std::size_t a : present)
      for (std::size_t b : present)
        if (a != b) g.spatial_edges[t].emplace_back(a, b);

    // Tracks are sorted by agent_id, so members come out in id order.
    for (int c = 0; c < n_cat; ++c) {
      CategoryNode node{c, {}};
      for (std::size_t i : present)
        if (scenario.tracks[i].category == c) node.members.push_back(i);
      if (node.members.empty()) continue;
      for (std::size_t i : node.members) g.category_agent_edges[t].emplace_back(c, i);
      g.category_nodes[t].push_back(std::move(node));
    }
    for (const CategoryNode& a : g.category_nodes[t])
      for (const CategoryNode& b : g.category_nodes[t]) g.category_edges[t].emplace_back(a.category, b.category);
  }
  return g;
}

Padded pad_to(std::size_t count, const std::vector<std::vector<double>>& rows, std::size_t feature_dim) {
  if (count < rows.size()) {
    throw PadError("cannot pad " + std::to_string(rows.size()) + " rows to " + std::to_string(count));
  }
  if (count == 0 || feature_dim == 0) throw ShapeError("pad_to needs a positive count and feature_dim");
  Padded out{numerics::Tensor({count, feature_dim}), std::vector<bool>(count, false)};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != feature_dim) {
      throw ShapeError("pad_to: row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                       " features, expected " + std::to_string(feature_dim));
    }
    for (std::size_t j = 0; j < feature_dim; ++j) out.block(r, j) = rows[r][j];
    out.mask[r] = true;
  }
  return out;
}

}  // namespace unin::trajdata
