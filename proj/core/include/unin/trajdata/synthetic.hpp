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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "unin/trajdata/scenario.hpp"

namespace unin::trajdata {

enum class Motif {
  kTurning,    // one agent starts a 60-110 degree turn just before observation ends
  kParallel,   // two same-category agents side by side at equal velocity
  kAvoidance,  // two agents on a near-collision course that steer apart
  kGroup,      // three agents converging on one point at the same time
};

std::string_view motif_name(Motif motif);
/// Throws ConfigError for unknown names.
Motif parse_motif(std::string_view name);

struct SpeedRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct GeneratorConfig {
  int num_scenarios = 10;
  std::vector<std::string> categories = default_categories();
  /// Background agents per category, in category order.
  std::vector<int> agents_per_category = {1, 2, 1};
  /// m/s, in category order.
  std::vector<SpeedRange> speed_ranges = {{4.0, 8.0}, {0.8, 1.6}, {2.0, 4.0}};
  /// Motif instances placed in every scenario. An avoidance pair is always
  /// added when the list has none.
  std::vector<Motif> motifs = {Motif::kTurning, Motif::kParallel, Motif::kAvoidance,
                               Motif::kGroup};
  std::uint64_t seed = 0;
  int t_obs = 4;
  int t_pred = 10;
  double frame_dt = 0.5;
  int substeps = 10;
};

struct MotifInstance {
  Motif kind;
  std::vector<std::int64_t> agent_ids;
};

struct AnnotatedScenario {
  Scenario scenario;
  std::vector<MotifInstance> motifs;
};

/// Throws ConfigError on invalid configuration. Scenario i depends only on
/// (config, i), never on how many scenarios are generated or in what order.
std::vector<AnnotatedScenario> generate_synthetic_annotated(const GeneratorConfig& config);

std::vector<Scenario> generate_synthetic(const GeneratorConfig& config);

/// Minimum distance between two agents if both kept the velocity of their
/// first frame, over the continuous interval [0, (frames - 1) * frame_dt].
double straight_line_min_distance(const AgentTrack& a, const AgentTrack& b, double frame_dt,
                                  int frames);

/// Minimum distance over the recorded frames where both agents are present.
double observed_min_distance(const AgentTrack& a, const AgentTrack& b);

}  // namespace unin::trajdata
