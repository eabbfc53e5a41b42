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

#include "unin/trajdata/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "unin/errors.hpp"
#include "unin/numerics/random.hpp"

namespace unin::trajdata {
namespace {

using numerics::Rng;

constexpr double kRelaxationTime = 0.5;  // s
constexpr double kRepulsionStrength = 2.0;
constexpr double kMaxRepulsion = 2.0;  // m/s^2
constexpr double kInteractionRadius = 4.0;
constexpr double kCellSpacing = 150.0;
constexpr double kFarAway = 1000.0;
constexpr int kMaxAttempts = 200;

constexpr double kAvoidanceExtrapolationMax = 0.5;
constexpr double kAvoidanceObservedMin = 0.3;
constexpr double kParallelHeadingTolDeg = 5.0;
constexpr double kTurningMinChangeDeg = 30.0;

struct SimAgent {
  std::int64_t id;
  int category;
  Vec2 p;
  Vec2 v;
  std::vector<Vec2> waypoints;
  std::size_t next = 0;
  double pref_speed;
  SpeedRange range;
  std::vector<Vec2> frames;
};

Vec2 unit(Vec2 v) {
  const double n = v.norm();
  return n > 0.0 ? v * (1.0 / n) : Vec2{1.0, 0.0};
}

Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

Vec2 heading(double angle) { return {std::cos(angle), std::sin(angle)}; }

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a < -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

class ScenarioBuilder {
 public:
  ScenarioBuilder(const GeneratorConfig& config, Rng& rng) : cfg_(config), rng_(rng) {}

  SimAgent& spawn(int category, Vec2 start, Vec2 direction, double speed, std::vector<Vec2> waypoints) {
    SimAgent a{next_id_++, category, start, direction * speed, std::move(waypoints), 0, speed,
               cfg_.speed_ranges[category], {}};
    agents_.push_back(std::move(a));
    return agents_.back();
  }

  double pref_speed(int category) {
    const SpeedRange r = cfg_.speed_ranges[category];
    const double margin = 0.1 * (r.hi - r.lo);
    return rng_.uniform(r.lo + margin, r.hi - margin);
  }

  int random_category() { return static_cast<int>(rng_.below(cfg_.categories.size())); }

  Vec2 cell_center(std::size_t cell) const {
    return {static_cast<double>(cell % 3) * kCellSpacing, static_cast<double>(cell / 3) * kCellSpacing};
  }

  double horizon() const { return (cfg_.t_pred - 1) * cfg_.frame_dt; }

  MotifInstance add_turning(Vec2 c) {
    const int cat = random_category();
    const double v = pref_speed(cat);
    // The waypoint falls 0.5 to 1.5 frames before observation ends, so the
    // last observed frames already bend while most of the turn lies ahead.
    const double t_turn = rng_.uniform(std::max(0.5, cfg_.t_obs - 2.5) * cfg_.frame_dt,
                                       std::max(1.0, cfg_.t_obs - 1.5) * cfg_.frame_dt);
    const Vec2 dir = heading(rng_.uniform(-std::numbers::pi, std::numbers::pi));
    const double sign = rng_.uniform() < 0.5 ? -1.0 : 1.0;
    const double turn = sign * rng_.uniform(60.0, 110.0) * std::numbers::pi / 180.0;
    const Vec2 start = c - dir * (v * t_turn);
    auto& a = spawn(cat, start, dir, v, {c, c + rotate(dir, turn) * kFarAway});
    return {Motif::kTurning, {a.id}};
  }

  MotifInstance add_parallel(Vec2 c) {
    const int cat = random_category();
    const double v = pref_speed(cat);
    const Vec2 dir = heading(rng_.uniform(-std::numbers::pi, std::numbers::pi));
    const double sep = rng_.uniform(1.5, 3.0);
    const Vec2 base = c - dir * (v * horizon() * 0.5);
    MotifInstance m{Motif::kParallel, {}};
    for (double side : {-0.5, 0.5}) {
      const Vec2 start = base + perp(dir) * (side * sep);
      m.agent_ids.push_back(spawn(cat, start, dir, v, {start + dir * kFarAway}).id);
    }
    return m;
  }

  MotifInstance add_avoidance(Vec2 c) {
    const int cat_a = random_category();
    const int cat_b = random_category();
    const double va = pref_speed(cat_a);
    const double vb = pref_speed(cat_b);
    const double t_meet = rng_.uniform(cfg_.t_obs * cfg_.frame_dt, (cfg_.t_pred - 2) * cfg_.frame_dt);
    const double theta = rng_.uniform(-std::numbers::pi, std::numbers::pi);
    const double crossing = rng_.uniform(100.0, 180.0) * std::numbers::pi / 180.0;
    const Vec2 da = heading(theta);
    const Vec2 db = heading(theta + crossing);
    // Straight-line miss distance at t_meet, perpendicular to the relative
    // velocity so it is also the closest approach.
    const Vec2 rel_dir = unit(db * vb - da * va);
    const Vec2 miss = perp(rel_dir) * rng_.uniform(0.0, 0.3);
    const Vec2 start_a = c - da * (va * t_meet);
    const Vec2 start_b = c + miss - db * (vb * t_meet);
    MotifInstance m{Motif::kAvoidance, {}};
    m.agent_ids.push_back(spawn(cat_a, start_a, da, va, {start_a + da * kFarAway}).id);
    m.agent_ids.push_back(spawn(cat_b, start_b, db, vb, {start_b + db * kFarAway}).id);
    return m;
  }

  MotifInstance add_group(Vec2 c) {
    const double t_meet = rng_.uniform(cfg_.t_obs * cfg_.frame_dt, (cfg_.t_pred - 2) * cfg_.frame_dt);
    const double theta = rng_.uniform(-std::numbers::pi, std::numbers::pi);
    const int first = random_category();
    const int n_cat = static_cast<int>(cfg_.categories.size());
    MotifInstance m{Motif::kGroup, {}};
    for (int k = 0; k < 3; ++k) {
      const int cat = (first + k) % n_cat;
      const double v = pref_speed(cat);
      const double jitter = rng_.uniform(-20.0, 20.0) * std::numbers::pi / 180.0;
      const Vec2 dir = heading(theta + k * 2.0 * std::numbers::pi / 3.0 + jitter);
      const Vec2 offset{rng_.uniform(-0.5, 0.5), rng_.uniform(-0.5, 0.5)};
      const Vec2 start = c + offset - dir * (v * t_meet);
      m.agent_ids.push_back(spawn(cat, start, dir, v, {start + dir * kFarAway}).id);
    }
    return m;
  }

  void add_background(Vec2 c) {
    for (std::size_t cat = 0; cat < cfg_.agents_per_category.size(); ++cat) {
      for (int n = 0; n < cfg_.agents_per_category[cat]; ++n) {
        const int ci = static_cast<int>(cat);
        const double v = pref_speed(ci);
        const Vec2 dir = heading(rng_.uniform(-std::numbers::pi, std::numbers::pi));
        const Vec2 start = c + Vec2{rng_.uniform(-15.0, 15.0), rng_.uniform(-15.0, 15.0)};
        spawn(ci, start, dir, v, {start + dir * kFarAway});
      }
    }
  }

  void simulate() {
    const int sub = std::max(1, cfg_.substeps);
    const double h = cfg_.frame_dt / sub;
    for (SimAgent& a : agents_) a.frames = {a.p};
    for (int f = 1; f < cfg_.t_pred; ++f) {
      for (int s = 0; s < sub; ++s) step(h);
      for (SimAgent& a : agents_) a.frames.push_back(a.p);
    }
  }

  Scenario to_scenario() const {
    Scenario s;
    s.t_obs = cfg_.t_obs;
    s.t_pred = cfg_.t_pred;
    s.frame_dt = cfg_.frame_dt;
    s.categories = cfg_.categories;
    for (const SimAgent& a : agents_) {
      s.tracks.push_back({a.id, a.category, a.frames, std::vector<bool>(a.frames.size(), true)});
    }
    return s;
  }

 private:
  void step(double h) {
    std::vector<Vec2> acc(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      SimAgent& a = agents_[i];
      while (a.next + 1 < a.waypoints.size() &&
             distance(a.p, a.waypoints[a.next]) < std::max(0.5, a.pref_speed * h * 2.0)) {
        ++a.next;
      }
      const Vec2 desired = unit(a.waypoints[a.next] - a.p) * a.pref_speed;
      Vec2 push{};
      for (std::size_t j = 0; j < agents_.size(); ++j) {
        if (j == i) continue;
        const SimAgent& b = agents_[j];
        const Vec2 rel = a.p - b.p;
        const double d = rel.norm();
        const Vec2 dv = a.v - b.v;
        if (d >= kInteractionRadius || d <= 1e-9 || rel.dot(dv) >= 0.0) continue;
        // Steer sideways relative to the approach direction.
        const Vec2 u = unit(dv);
        Vec2 side = rel - u * rel.dot(u);
        if (side.norm() < 1e-6) side = perp(u);
        push += unit(side) * std::min(kRepulsionStrength / d, kMaxRepulsion);
      }
      const double pn = push.norm();
      if (pn > kMaxRepulsion) push = push * (kMaxRepulsion / pn);
      acc[i] = (desired - a.v) * (1.0 / kRelaxationTime) + push;
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      SimAgent& a = agents_[i];
      a.v += acc[i] * h;
      const double speed = a.v.norm();
      if (speed < a.range.lo) a.v = unit(speed > 0.0 ? a.v : a.waypoints[a.next] - a.p) * a.range.lo;
      if (speed > a.range.hi) a.v = a.v * (a.range.hi / speed);
      a.p += a.v * h;
    }
  }

  const GeneratorConfig& cfg_;
  Rng& rng_;
  std::vector<SimAgent> agents_;
  std::int64_t next_id_ = 0;
};

const AgentTrack& track_by_id(const Scenario& s, std::int64_t id) {
  for (const AgentTrack& t : s.tracks)
    if (t.agent_id == id) return t;
  throw ContractError("unknown agent id " + std::to_string(id));
}

double frame_heading(const AgentTrack& t, int f) {
  const Vec2 d = t.positions[f + 1] - t.positions[f];
  return std::atan2(d.y, d.x);
}

bool motif_holds(const Scenario& s, const MotifInstance& m) {
  const int frames = s.t_pred;
  switch (m.kind) {
    case Motif::kAvoidance: {
      const AgentTrack& a = track_by_id(s, m.agent_ids[0]);
      const AgentTrack& b = track_by_id(s, m.agent_ids[1]);
      return straight_line_min_distance(a, b, s.frame_dt, frames) < kAvoidanceExtrapolationMax &&
             observed_min_distance(a, b) > kAvoidanceObservedMin;
    }
    case Motif::kParallel: {
      const AgentTrack& a = track_by_id(s, m.agent_ids[0]);
      const AgentTrack& b = track_by_id(s, m.agent_ids[1]);
      for (int f = 0; f + 1 < frames; ++f) {
        if (std::abs(deg(wrap_angle(frame_heading(a, f) - frame_heading(b, f)))) > kParallelHeadingTolDeg)
          return false;
      }
      return true;
    }
    case Motif::kTurning: {
      const AgentTrack& a = track_by_id(s, m.agent_ids[0]);
      return std::abs(deg(wrap_angle(frame_heading(a, frames - 2) - frame_heading(a, 0)))) >=
             kTurningMinChangeDeg;
    }
    case Motif::kGroup:
      return true;
  }
  return false;
}

void check_config(const GeneratorConfig& c) {
  const std::size_t n_cat = c.categories.size();
  if (n_cat < 2) throw ConfigError("generator needs at least 2 categories");
  if (c.num_scenarios < 1) throw ConfigError("generator needs num_scenarios >= 1");
  if (c.agents_per_category.size() != n_cat) {
    throw ConfigError("agents_per_category needs one entry per category");
  }
  if (c.speed_ranges.size() != n_cat) throw ConfigError("speed_ranges needs one entry per category");
  int total = 0;
  for (int n : c.agents_per_category) {
    if (n < 0) throw ConfigError("agents_per_category entries must be non-negative");
    total += n;
  }
  if (total == 0) throw ConfigError("generator config requests zero agents");
  for (const SpeedRange& r : c.speed_ranges) {
    if (!(r.lo > 0.0 && r.hi > r.lo)) throw ConfigError("speed ranges need 0 < lo < hi");
  }
  if (!(c.t_obs > 0 && c.t_obs < c.t_pred)) throw ConfigError("generator needs 0 < t_obs < t_pred");
  if (c.t_pred - c.t_obs < 2) throw ConfigError("generator needs at least 2 future frames");
  if (!(c.frame_dt > 0.0)) throw ConfigError("frame_dt must be positive");
}

}  // namespace

std::string_view motif_name(Motif motif) {
  switch (motif) {
    case Motif::kTurning: return "turning";
    case Motif::kParallel: return "parallel";
    case Motif::kAvoidance: return "avoidance";
    case Motif::kGroup: return "group";
  }
  return "unknown";
}

Motif parse_motif(std::string_view name) {
  for (Motif m : {Motif::kTurning, Motif::kParallel, Motif::kAvoidance, Motif::kGroup}) {
    if (motif_name(m) == name) return m;
  }
  throw ConfigError("unknown motif '" + std::string(name) + "'");
}

std::vector<AnnotatedScenario> generate_synthetic_annotated(const GeneratorConfig& config) {
  check_config(config);
  std::vector<Motif> motifs = config.motifs;
  if (std::find(motifs.begin(), motifs.end(), Motif::kAvoidance) == motifs.end()) {
    motifs.push_back(Motif::kAvoidance);
  }
  std::vector<AnnotatedScenario> out;
  out.reserve(config.num_scenarios);
  for (int index = 0; index < config.num_scenarios; ++index) {
    Rng rng(numerics::derive_seed(config.seed, static_cast<std::uint64_t>(index)));
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      ScenarioBuilder builder(config, rng);
      AnnotatedScenario result;
      std::size_t cell = 0;
      for (Motif m : motifs) {
        const Vec2 c = builder.cell_center(cell++);
        switch (m) {
          case Motif::kTurning: result.motifs.push_back(builder.add_turning(c)); break;
          case Motif::kParallel: result.motifs.push_back(builder.add_parallel(c)); break;
          case Motif::kAvoidance: result.motifs.push_back(builder.add_avoidance(c)); break;
          case Motif::kGroup: result.motifs.push_back(builder.add_group(c)); break;
        }
      }
      builder.add_background(builder.cell_center(cell));
      builder.simulate();
      result.scenario = builder.to_scenario();
      done = std::all_of(result.motifs.begin(), result.motifs.end(),
                         [&](const MotifInstance& m) { return motif_holds(result.scenario, m); });
      if (done) {
        validate(result.scenario);
        out.push_back(std::move(result));
      }
    }
    if (!done) {
      throw ConfigError("could not realize the requested motifs for scenario " + std::to_string(index));
    }
  }
  return out;
}

std::vector<Scenario> generate_synthetic(const GeneratorConfig& config) {
  std::vector<Scenario> out;
  for (auto& a : generate_synthetic_annotated(config)) out.push_back(std::move(a.scenario));
  return out;
}

double straight_line_min_distance(const AgentTrack& a, const AgentTrack& b, double frame_dt, int frames) {
  if (a.positions.size() < 2 || b.positions.size() < 2) {
    throw ContractError("straight-line extrapolation needs two frames per agent");
  }
  const Vec2 dp = b.positions[0] - a.positions[0];
  const Vec2 dv = ((b.positions[1] - b.positions[0]) - (a.positions[1] - a.positions[0])) * (1.0 / frame_dt);
  const double horizon = (frames - 1) * frame_dt;
  const double vv = dv.dot(dv);
  const double t = vv > 0.0 ? std::clamp(-dp.dot(dv) / vv, 0.0, horizon) : 0.0;
  return (dp + dv * t).norm();
}

double observed_min_distance(const AgentTrack& a, const AgentTrack& b) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = std::min(a.positions.size(), b.positions.size());
  for (std::size_t t = 0; t < n; ++t) {
    if (a.present[t] && b.present[t]) best = std::min(best, distance(a.positions[t], b.positions[t]));
  }
  return best;
}

}  // namespace unin::trajdata
