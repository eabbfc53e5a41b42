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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace unin::trajdata {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// One agent over the full scenario window. positions[t] is meaningful only
/// where present[t] is true.
struct AgentTrack {
  std::int64_t agent_id = 0;
  int category = 0;
  std::vector<Vec2> positions;
  std::vector<bool> present;

  bool operator==(const AgentTrack&) const = default;
};

/// A window of t_pred frames; the first t_obs are observed, the rest are the
/// prediction horizon. Tracks are ordered by ascending agent_id, and that
/// order is the agent index used by every interaction matrix.
struct Scenario {
  std::vector<AgentTrack> tracks;
  int t_obs = 0;
  int t_pred = 0;
  double frame_dt = 0.5;
  std::vector<std::string> categories;

  std::size_t agent_count() const { return tracks.size(); }
  std::size_t category_count() const { return categories.size(); }
  int future_steps() const { return t_pred - t_obs; }

  bool operator==(const Scenario&) const = default;
};

/// Throws ContractError naming the first violated invariant.
void validate(const Scenario& scenario);

/// Index of the last observed frame where the agent is present, or -1.
int last_observed_frame(const AgentTrack& track, int t_obs);

nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

/// Default table used when a data source does not declare one.
std::vector<std::string> default_categories();

}  // namespace unin::trajdata
