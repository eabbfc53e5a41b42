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

#include "unin/metrics/metrics.hpp"

#include <string>

#include "unin/errors.hpp"

namespace unin::metrics {

namespace {

void check_aligned(const Trajectories& pred, const Trajectories& truth, const StepMask& mask) {
  if (pred.size() != truth.size() || mask.size() != truth.size()) {
    throw ShapeError("metrics: prediction, truth and mask disagree on agent count");
  }
  for (std::size_t a = 0; a < truth.size(); ++a) {
    if (pred[a].size() != truth[a].size() || mask[a].size() != truth[a].size()) {
      throw ShapeError("metrics: agent " + std::to_string(a) + " has misaligned horizons");
    }
  }
}

std::size_t horizon(const Trajectories& truth) { return truth.empty() ? 0 : truth[0].size(); }

}  // namespace

double ade(const Trajectories& pred, const Trajectories& truth, const StepMask& mask) {
  check_aligned(pred, truth, mask);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t a = 0; a < truth.size(); ++a)
    for (std::size_t s = 0; s < truth[a].size(); ++s)
      if (mask[a][s]) {
        total += trajdata::distance(pred[a][s], truth[a][s]);
        ++count;
      }
  if (count == 0) throw EmptyDatasetError("ade: no masked (agent, step) pairs");
  return total / static_cast<double>(count);
}

double fde(const Trajectories& pred, const Trajectories& truth, const StepMask& mask, FdeDenominator denominator) {
  check_aligned(pred, truth, mask);
  const std::size_t steps = horizon(truth);
  double total = 0.0;
  std::size_t count = 0;
  if (steps > 0) {
    for (std::size_t a = 0; a < truth.size(); ++a)
      if (mask[a][steps - 1]) {
        total += trajdata::distance(pred[a][steps - 1], truth[a][steps - 1]);
        ++count;
      }
  }
  if (count == 0) throw EmptyDatasetError("fde: no agent is present at the final step");
  const double denom = denominator == FdeDenominator::kAgents ? static_cast<double>(count)
                                                              : static_cast<double>(count * steps);
  return total / denom;
}

CategoryWeights default_category_weights() {
  return {{"vehicle", 0.20}, {"pedestrian", 0.58}, {"cyclist", 0.22}};
}

std::pair<double, double> weighted_metrics(const std::map<std::string, CategoryMetric>& per_category,
                                           const CategoryWeights& weights) {
  double w_ade = 0.0, w_fde = 0.0, ade_sum = 0.0, fde_sum = 0.0;
  for (const auto& [name, m] : per_category) {
    if (m.pairs == 0 && m.finals == 0) continue;
    auto it = weights.find(name);
    if (it == weights.end()) throw ConfigError("no weight for category '" + name + "'");
    if (!(it->second >= 0.0)) throw ConfigError("weight for category '" + name + "' is negative");
    if (m.pairs > 0) {
      w_ade += it->second;
      ade_sum += it->second * m.ade;
    }
    if (m.finals > 0) {
      w_fde += it->second;
      fde_sum += it->second * m.fde;
    }
  }
  if (!(w_ade > 0.0) || !(w_fde > 0.0)) throw ConfigError("category weights sum to zero over present categories");
  return {ade_sum / w_ade, fde_sum / w_fde};
}

Trajectories select_best_of_k(const SampleSet& samples, const Trajectories& truth, const StepMask& mask) {
  if (samples.empty()) throw ContractError("best_of_k needs at least one sample");
  for (const Trajectories& s : samples) check_aligned(s, truth, mask);
  Trajectories best(truth.size());
  for (std::size_t a = 0; a < truth.size(); ++a) {
    std::size_t pick = 0;
    double pick_err = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      double err = 0.0;
      for (std::size_t s = 0; s < truth[a].size(); ++s)
        if (mask[a][s]) err += trajdata::distance(samples[k][a][s], truth[a][s]);
      if (k == 0 || err < pick_err) {
        pick = k;
        pick_err = err;
      }
    }
    best[a] = samples[pick][a];
  }
  return best;
}

BestOfK best_of_k(const SampleSet& samples, const Trajectories& truth, const StepMask& mask) {
  const Trajectories best = select_best_of_k(samples, truth, mask);
  return {ade(best, truth, mask), fde(best, truth, mask)};
}

Trajectories constant_velocity_baseline(const Trajectories& observed, std::size_t steps) {
  Trajectories out;
  out.reserve(observed.size());
  for (const std::vector<Vec2>& obs : observed) {
    if (obs.empty()) throw ContractError("constant_velocity_baseline: agent without observations");
    const Vec2 last = obs.back();
    const Vec2 v = obs.size() >= 2 ? last - obs[obs.size() - 2] : Vec2{0.0, 0.0};
    std::vector<Vec2> pred(steps);
    for (std::size_t s = 0; s < steps; ++s) pred[s] = last + v * static_cast<double>(s + 1);
    out.push_back(std::move(pred));
  }
  return out;
}

Trajectories constant_velocity_baseline(const trajdata::Scenario& sc) {
  const auto steps = static_cast<std::size_t>(sc.future_steps());
  Trajectories out(sc.agent_count(), std::vector<Vec2>(steps));
  for (std::size_t i = 0; i < sc.agent_count(); ++i) {
    const trajdata::AgentTrack& tr = sc.tracks[i];
    const int last = trajdata::last_observed_frame(tr, sc.t_obs);
    if (last < 0) continue;
    const Vec2 anchor = tr.positions[last];
    const Vec2 v = last >= 1 && tr.present[last - 1] ? anchor - tr.positions[last - 1] : Vec2{0.0, 0.0};
    for (std::size_t s = 0; s < steps; ++s) {
      const int frame = sc.t_obs + static_cast<int>(s);
      out[i][s] = anchor + v * static_cast<double>(frame - last);
    }
  }
  return out;
}

std::pair<Trajectories, StepMask> future_truth(const trajdata::Scenario& sc) {
  const auto steps = static_cast<std::size_t>(sc.future_steps());
  Trajectories truth(sc.agent_count(), std::vector<Vec2>(steps));
  StepMask mask(sc.agent_count(), std::vector<bool>(steps, false));
  for (std::size_t i = 0; i < sc.agent_count(); ++i) {
    const trajdata::AgentTrack& tr = sc.tracks[i];
    const bool observed = trajdata::last_observed_frame(tr, sc.t_obs) >= 0;
    for (std::size_t s = 0; s < steps; ++s) {
      const auto frame = static_cast<std::size_t>(sc.t_obs) + s;
      truth[i][s] = tr.positions[frame];
      mask[i][s] = observed && tr.present[frame];
    }
  }
  return {truth, mask};
}

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [name, m] : r.per_category) {
    per[name] = {{"ade", m.ade}, {"fde", m.fde}, {"pairs", m.pairs}, {"finals", m.finals}};
  }
  nlohmann::json out = {{"protocol", r.protocol},
                        {"ade", r.ade},
                        {"fde", r.fde},
                        {"per_category", per},
                        {"counts", {{"pairs", r.pairs}, {"finals", r.finals}, {"scenarios", r.scenarios}}}};
  if (r.wade) out["wade"] = *r.wade;
  if (r.wfde) out["wfde"] = *r.wfde;
  return out;
}

MetricAccumulator::MetricAccumulator(std::vector<std::string> categories)
    : categories_(std::move(categories)), per_category_(categories_.size()) {}

void MetricAccumulator::add(const Trajectories& pred, const Trajectories& truth, const StepMask& mask,
                            const std::vector<int>& membership) {
  check_aligned(pred, truth, mask);
  if (membership.size() != truth.size()) throw ShapeError("metrics: membership length differs from agent count");
  const std::size_t steps = horizon(truth);
  if (scenarios_ > 0 && steps != steps_) throw ShapeError("metrics: scenarios disagree on the horizon");
  steps_ = steps;
  for (std::size_t a = 0; a < truth.size(); ++a) {
    const int c = membership[a];
    if (c < 0 || static_cast<std::size_t>(c) >= categories_.size()) {
      throw MembershipError("metrics: category " + std::to_string(c) + " outside the table");
    }
    Totals& tot = per_category_[static_cast<std::size_t>(c)];
    for (std::size_t s = 0; s < steps; ++s) {
      if (!mask[a][s]) continue;
      const double err = trajdata::distance(pred[a][s], truth[a][s]);
      tot.ade_sum += err;
      ++tot.pairs;
      ++pairs_;
      if (s + 1 == steps) {
        tot.fde_sum += err;
        ++tot.finals;
      }
    }
  }
  ++scenarios_;
}

MetricReport MetricAccumulator::report(std::string protocol, const std::optional<CategoryWeights>& weights,
                                       FdeDenominator denominator) const {
  Totals all;
  for (const Totals& t : per_category_) {
    all.ade_sum += t.ade_sum;
    all.pairs += t.pairs;
    all.fde_sum += t.fde_sum;
    all.finals += t.finals;
  }
  if (all.pairs == 0) throw EmptyDatasetError("metrics: no masked (agent, step) pairs");
  if (all.finals == 0) throw EmptyDatasetError("metrics: no agent is present at the final step");
  auto fde_of = [&](const Totals& t) {
    const double n = static_cast<double>(t.finals);
    return t.fde_sum / (denominator == FdeDenominator::kAgents ? n : n * static_cast<double>(steps_));
  };
  MetricReport r;
  r.protocol = std::move(protocol);
  r.ade = all.ade_sum / static_cast<double>(all.pairs);
  r.fde = fde_of(all);
  r.pairs = all.pairs;
  r.finals = all.finals;
  r.scenarios = scenarios_;
  for (std::size_t c = 0; c < categories_.size(); ++c) {
    const Totals& t = per_category_[c];
    if (t.pairs == 0) continue;
    CategoryMetric m;
    m.ade = t.ade_sum / static_cast<double>(t.pairs);
    m.fde = t.finals ? fde_of(t) : 0.0;
    m.pairs = t.pairs;
    m.finals = t.finals;
    r.per_category[categories_[c]] = m;
  }
  if (weights) {
    const auto [wade, wfde] = weighted_metrics(r.per_category, *weights);
    r.wade = wade;
    r.wfde = wfde;
  }
  return r;
}

std::string deterministic_protocol() { return "deterministic"; }
std::string best_of_protocol(std::size_t k) { return "best-of-K:" + std::to_string(k); }

}  // namespace unin::metrics
