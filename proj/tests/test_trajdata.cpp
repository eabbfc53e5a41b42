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

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "unin/errors.hpp"
#include "unin/trajdata/csv.hpp"
#include "unin/trajdata/scenario.hpp"
#include "unin/trajdata/split.hpp"
#include "unin/trajdata/stc_graph.hpp"
#include "unin/trajdata/synthetic.hpp"

namespace td = unin::trajdata;

namespace {

// frame,agent,category,x,y for `frames` frames of agents moving along x.
std::string grid_csv(int frames, int agents) {
  std::string out = "# categories: vehicle,pedestrian,cyclist\n";
  for (int f = 0; f < frames; ++f)
    for (int a = 0; a < agents; ++a) out += fmt::format("{},{},{},{},{}\n", f, a + 1, a % 3, 0.5 * f, 2.0 * a);
  return out;
}

td::WindowOptions window(int t_obs, int t_pred) {
  td::WindowOptions w;
  w.t_obs = t_obs;
  w.t_pred = t_pred;
  return w;
}

double heading_deg(td::Vec2 v) { return std::atan2(v.y, v.x) * 180.0 / std::numbers::pi; }

double angle_gap_deg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

}  // namespace

TEST(Csv, ExactFitWindow) {
  const auto scenarios = td::parse_csv(grid_csv(5, 2), window(2, 5));
  ASSERT_EQ(scenarios.size(), 1u);
  ASSERT_EQ(scenarios[0].tracks.size(), 2u);
  for (const td::AgentTrack& tr : scenarios[0].tracks) EXPECT_EQ(tr.positions.size(), 5u);
  EXPECT_EQ(scenarios[0].categories, (std::vector<std::string>{"vehicle", "pedestrian", "cyclist"}));
}

TEST(Csv, NonNumericFieldCitesLine) {
  std::string text = "0,1,0,0,0\n1,1,0,1,0\n2,1,0,2,0\n3,1,0,3,0\n4,1,0,4,0\n5,1,0,5,0\n6,1,0,oops,0\n";
  try {
    td::parse_csv(text, window(2, 5));
    FAIL() << "expected ParseError";
  } catch (const unin::ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos);
  }
}

TEST(Csv, TenFramesGiveTwoDisjointWindows) {
  const auto scenarios = td::parse_csv(grid_csv(10, 1), window(2, 5));
  ASSERT_EQ(scenarios.size(), 2u);
  EXPECT_DOUBLE_EQ(scenarios[0].tracks[0].positions[0].x, 0.0);
  EXPECT_DOUBLE_EQ(scenarios[1].tracks[0].positions[0].x, 2.5);
}

TEST(Csv, OverlappingStride) {
  td::WindowOptions w = window(2, 5);
  w.stride = 1;
  EXPECT_EQ(td::parse_csv(grid_csv(10, 1), w).size(), 6u);
}

TEST(Csv, AgentsSeenTooBrieflyAreDropped) {
  std::string text = grid_csv(5, 1);
  text += "4,9,1,7,7\n";  // agent 9 only appears at the last frame
  const auto scenarios = td::parse_csv(text, window(2, 5));
  ASSERT_EQ(scenarios.size(), 1u);
  EXPECT_EQ(scenarios[0].tracks.size(), 1u);
}

TEST(Csv, TooFewFramesIsEmptyDataset) {
  EXPECT_THROW(td::parse_csv(grid_csv(3, 2), window(2, 5)), unin::EmptyDatasetError);
}

TEST(Csv, FormatThenParseRoundTrips) {
  td::GeneratorConfig g;
  g.num_scenarios = 2;
  g.seed = 5;
  for (const td::Scenario& sc : td::generate_synthetic(g)) {
    const auto back = td::parse_csv(td::format_csv(sc), window(sc.t_obs, sc.t_pred));
    ASSERT_EQ(back.size(), 1u);
    ASSERT_EQ(back[0].tracks.size(), sc.tracks.size());
    for (std::size_t i = 0; i < sc.tracks.size(); ++i) {
      EXPECT_EQ(back[0].tracks[i].agent_id, sc.tracks[i].agent_id);
      for (std::size_t f = 0; f < sc.tracks[i].positions.size(); ++f) {
        EXPECT_EQ(back[0].tracks[i].positions[f], sc.tracks[i].positions[f]);
      }
    }
  }
}

TEST(Csv, WindowsReproduceSourceRows) {
  const std::string text = grid_csv(15, 3);
  const auto scenarios = td::parse_csv(text, window(2, 5));
  std::string rebuilt = "# categories: vehicle,pedestrian,cyclist\n";
  int base = 0;
  for (const td::Scenario& sc : scenarios) {
    for (int f = 0; f < sc.t_pred; ++f)
      for (const td::AgentTrack& tr : sc.tracks)
        rebuilt += fmt::format("{},{},{},{},{}\n", base + f, tr.agent_id, tr.category, tr.positions[f].x,
                               tr.positions[f].y);
    base += sc.t_pred;
  }
  EXPECT_EQ(rebuilt, text);
}

TEST(Synthetic, SameSeedIsByteIdentical) {
  td::GeneratorConfig g;
  g.num_scenarios = 3;
  g.seed = 17;
  const auto a = td::generate_synthetic(g);
  const auto b = td::generate_synthetic(g);
  ASSERT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(td::format_csv(a[i]), td::format_csv(b[i]));
}

TEST(Synthetic, ScenarioDependsOnlyOnIndex) {
  td::GeneratorConfig g;
  g.seed = 3;
  g.num_scenarios = 2;
  const auto small = td::generate_synthetic(g);
  g.num_scenarios = 5;
  const auto large = td::generate_synthetic(g);
  EXPECT_EQ(small[0], large[0]);
  EXPECT_EQ(small[1], large[1]);
}

TEST(Synthetic, ParallelMotifHeadingsAgree) {
  td::GeneratorConfig g;
  g.num_scenarios = 5;
  g.motifs = {td::Motif::kParallel};
  for (const td::AnnotatedScenario& as : td::generate_synthetic_annotated(g)) {
    for (const td::MotifInstance& m : as.motifs) {
      if (m.kind != td::Motif::kParallel) continue;
      ASSERT_EQ(m.agent_ids.size(), 2u);
      const td::AgentTrack* a = nullptr;
      const td::AgentTrack* b = nullptr;
      for (const td::AgentTrack& tr : as.scenario.tracks) {
        if (tr.agent_id == m.agent_ids[0]) a = &tr;
        if (tr.agent_id == m.agent_ids[1]) b = &tr;
      }
      ASSERT_TRUE(a && b);
      for (std::size_t f = 1; f < a->positions.size(); ++f) {
        const double ha = heading_deg(a->positions[f] - a->positions[f - 1]);
        const double hb = heading_deg(b->positions[f] - b->positions[f - 1]);
        EXPECT_LT(angle_gap_deg(ha, hb), 5.0);
      }
    }
  }
}

TEST(Synthetic, AvoidanceMissesYetWouldHaveCollided) {
  td::GeneratorConfig g;
  g.num_scenarios = 8;
  g.seed = 23;
  for (const td::AnnotatedScenario& as : td::generate_synthetic_annotated(g)) {
    int avoidance = 0;
    for (const td::MotifInstance& m : as.motifs) {
      if (m.kind != td::Motif::kAvoidance) continue;
      ++avoidance;
      const td::AgentTrack* a = nullptr;
      const td::AgentTrack* b = nullptr;
      for (const td::AgentTrack& tr : as.scenario.tracks) {
        if (tr.agent_id == m.agent_ids[0]) a = &tr;
        if (tr.agent_id == m.agent_ids[1]) b = &tr;
      }
      ASSERT_TRUE(a && b);
      EXPECT_GT(td::observed_min_distance(*a, *b), 0.3);
      EXPECT_LT(td::straight_line_min_distance(*a, *b, as.scenario.frame_dt, as.scenario.t_pred), 0.5);
    }
    EXPECT_GE(avoidance, 1);
  }
}

TEST(Synthetic, BackgroundSpeedsStayInRange) {
  td::GeneratorConfig g;
  g.num_scenarios = 6;
  g.motifs = {};
  for (const td::AnnotatedScenario& as : td::generate_synthetic_annotated(g)) {
    std::set<std::int64_t> in_motif;
    for (const td::MotifInstance& m : as.motifs) in_motif.insert(m.agent_ids.begin(), m.agent_ids.end());
    for (const td::AgentTrack& tr : as.scenario.tracks) {
      if (in_motif.count(tr.agent_id)) continue;
      const td::SpeedRange r = g.speed_ranges[static_cast<std::size_t>(tr.category)];
      double total = 0.0;
      for (std::size_t f = 1; f < tr.positions.size(); ++f) total += td::distance(tr.positions[f], tr.positions[f - 1]);
      const double speed = total / ((tr.positions.size() - 1) * as.scenario.frame_dt);
      EXPECT_GE(speed, r.lo - 1e-9);
      EXPECT_LE(speed, r.hi + 1e-9);
    }
  }
}

TEST(Synthetic, ZeroAgentsIsConfigError) {
  td::GeneratorConfig g;
  g.agents_per_category = {0, 0, 0};
  EXPECT_THROW(td::generate_synthetic(g), unin::ConfigError);
  g = {};
  g.categories = {"only"};
  g.agents_per_category = {1};
  g.speed_ranges = {{1.0, 2.0}};
  EXPECT_THROW(td::generate_synthetic(g), unin::ConfigError);
  EXPECT_THROW(td::parse_motif("spiral"), unin::ConfigError);
}

TEST(Synthetic, ScenariosAreValid) {
  td::GeneratorConfig g;
  g.num_scenarios = 10;
  for (const td::Scenario& sc : td::generate_synthetic(g)) EXPECT_NO_THROW(td::validate(sc));
}

TEST(Split, DefaultRatiosOnTen) {
  std::vector<int> items(10);
  for (int i = 0; i < 10; ++i) items[i] = i;
  const auto s = td::split_dataset(items, {0.6, 0.2, 0.2}, 1);
  EXPECT_EQ(s.train.size(), 6u);
  EXPECT_EQ(s.val.size(), 2u);
  EXPECT_EQ(s.test.size(), 2u);
}

TEST(Split, DegenerateRatios) {
  const auto s = td::split_dataset(std::vector<int>{42}, {1.0, 0.0, 0.0}, 1);
  EXPECT_EQ(s.train, std::vector<int>{42});
  EXPECT_TRUE(s.val.empty());
  EXPECT_TRUE(s.test.empty());
}

TEST(Split, RemainderGoesToTrain) {
  const td::SplitSizes s = td::split_sizes(7, {0.6, 0.2, 0.2});
  EXPECT_EQ(s.train, 5u);
  EXPECT_EQ(s.val, 1u);
  EXPECT_EQ(s.test, 1u);
}

TEST(Split, Errors) {
  EXPECT_THROW(td::split_sizes(2, {0.6, 0.2, 0.2}), unin::SplitError);
  EXPECT_THROW(td::split_sizes(0, {1.0, 0.0, 0.0}), unin::SplitError);
  EXPECT_THROW(td::split_sizes(10, {0.5, 0.2, 0.2}), unin::SplitError);
}

TEST(Split, PartitionProperty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed * 3;
    std::vector<std::size_t> items(n);
    for (std::size_t i = 0; i < n; ++i) items[i] = i;
    const auto s = td::split_dataset(items, {0.6, 0.2, 0.2}, seed);
    std::multiset<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all, std::multiset<std::size_t>(items.begin(), items.end()));
    EXPECT_EQ(td::split_dataset(items, {0.6, 0.2, 0.2}, seed).train, s.train);
  }
}

TEST(StcGraph, MinimalGraph) {
  td::Scenario sc;
  sc.t_obs = 1;
  sc.t_pred = 2;
  sc.categories = {"a", "b"};
  sc.tracks.push_back(unin::testing::straight_track(1, 0, {0, 0}, {1, 0}, 2));
  const td::STCGraph g = td::build_stc_graph(sc);
  EXPECT_EQ(g.agent_nodes[0].size() + g.agent_nodes[1].size(), 2u);
  EXPECT_EQ(g.temporal_edges.size(), 1u);
  EXPECT_TRUE(g.spatial_edges[0].empty());
  EXPECT_EQ(g.category_nodes[0].size(), 1u);
  EXPECT_EQ(g.category_nodes[1].size(), 1u);
}

TEST(StcGraph, EdgeCounts) {
  td::Scenario sc;
  sc.t_obs = 1;
  sc.t_pred = 2;
  sc.categories = {"a", "b"};
  sc.tracks.push_back(unin::testing::straight_track(1, 0, {0, 0}, {1, 0}, 2));
  sc.tracks.push_back(unin::testing::straight_track(2, 0, {0, 1}, {1, 0}, 2));
  sc.tracks.push_back(unin::testing::straight_track(3, 1, {0, 2}, {1, 0}, 2));
  sc.tracks.push_back(unin::testing::straight_track(4, 1, {0, 3}, {1, 0}, 2));
  const td::STCGraph g = td::build_stc_graph(sc);
  EXPECT_EQ(g.spatial_edges[0].size(), 12u);
  EXPECT_EQ(g.category_edges[0].size(), 4u);
  EXPECT_EQ(g.category_agent_edges[0].size(), 4u);
  sc.tracks.pop_back();
  EXPECT_EQ(td::build_stc_graph(sc).spatial_edges[0].size(), 6u);
}

TEST(StcGraph, MembershipConsistency) {
  td::GeneratorConfig gc;
  gc.num_scenarios = 4;
  for (td::Scenario sc : td::generate_synthetic(gc)) {
    sc.tracks[1].present[2] = false;  // an agent leaving briefly
    const td::STCGraph g = td::build_stc_graph(sc);
    for (int t = 0; t < sc.t_pred; ++t) {
      std::size_t members = 0;
      for (const td::CategoryNode& cn : g.category_nodes[t]) {
        EXPECT_FALSE(cn.members.empty());
        EXPECT_TRUE(std::is_sorted(cn.members.begin(), cn.members.end()));
        members += cn.members.size();
      }
      std::size_t present = 0;
      for (const td::AgentTrack& tr : sc.tracks) present += tr.present[t] ? 1 : 0;
      EXPECT_EQ(members, present);
      EXPECT_EQ(g.agent_nodes[t].size(), present);
      for (const auto& [i, j] : g.spatial_edges[t]) {
        EXPECT_NE(std::find(g.spatial_edges[t].begin(), g.spatial_edges[t].end(), std::make_pair(j, i)),
                  g.spatial_edges[t].end());
      }
    }
  }
}

TEST(PadTo, ZeroFillsAndMasks) {
  const td::Padded p = td::pad_to(4, {{1, 2}, {3, 4}}, 2);
  EXPECT_EQ(p.mask, (std::vector<bool>{true, true, false, false}));
  EXPECT_EQ(p.block, (unin::numerics::Tensor({4, 2}, {1, 2, 3, 4, 0, 0, 0, 0})));
}

TEST(PadTo, ExactCountIsIdentity) {
  const td::Padded p = td::pad_to(3, {{1}, {2}, {3}}, 1);
  EXPECT_EQ(p.mask, (std::vector<bool>{true, true, true}));
  EXPECT_EQ(p.block, (unin::numerics::Tensor({3, 1}, {1, 2, 3})));
}

TEST(PadTo, Errors) {
  EXPECT_THROW(td::pad_to(1, {{1}, {2}}, 1), unin::PadError);
  EXPECT_THROW(td::pad_to(3, {{1, 2}, {3}}, 2), unin::ShapeError);
}

TEST(PadTo, PaddedSoftmaxMatchesUnpadded) {
  const td::Padded p = td::pad_to(4, {{0.3}, {-1.2}}, 1);
  const auto padded = unin::numerics::eval::softmax(p.block.reshaped({4}), 0, &p.mask);
  const auto native = unin::numerics::eval::softmax(unin::numerics::Tensor::vector({0.3, -1.2}), 0);
  EXPECT_EQ(padded[0], native[0]);
  EXPECT_EQ(padded[1], native[1]);
}

TEST(ScenarioJson, RoundTrip) {
  const td::Scenario sc = unin::testing::three_agent_scenario();
  EXPECT_EQ(td::scenario_from_json(td::to_json(sc)), sc);
}
