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

#include "unin/trajdata/scenario.hpp"

#include "unin/errors.hpp"

namespace unin::trajdata {

void validate(const Scenario& s) {
  if (!(s.t_obs > 0 && s.t_obs < s.t_pred)) {
    throw ContractError("scenario needs 0 < t_obs < t_pred, got t_obs=" + std::to_string(s.t_obs) +
                        " t_pred=" + std::to_string(s.t_pred));
  }
  if (!(s.frame_dt > 0.0)) throw ContractError("scenario frame_dt must be positive");
  if (s.categories.empty()) throw ContractError("scenario has an empty category table");
  if (s.tracks.empty()) throw ContractError("scenario has no agents");
  for (std::size_t i = 0; i < s.tracks.size(); ++i) {
    const AgentTrack& tr = s.tracks[i];
    if (tr.positions.size() != static_cast<std::size_t>(s.t_pred) ||
        tr.present.size() != tr.positions.size()) {
      throw ContractError("agent " + std::to_string(tr.agent_id) + " does not span t_pred frames");
    }
    if (tr.category < 0 || static_cast<std::size_t>(tr.category) >= s.categories.size()) {
      throw ContractError("agent " + std::to_string(tr.agent_id) + " has category " +
                          std::to_string(tr.category) + " outside the category table");
    }
    if (i > 0 && s.tracks[i - 1].agent_id >= tr.agent_id) {
      throw ContractError("tracks must be sorted by strictly ascending agent_id");
    }
    for (const Vec2& p : tr.positions) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw ContractError("agent " + std::to_string(tr.agent_id) + " has a non-finite position");
      }
    }
  }
  for (int t = 0; t < s.t_obs; ++t) {
    bool any = false;
    for (const AgentTrack& tr : s.tracks) any = any || tr.present[t];
    if (!any) throw ContractError("no agent present at observed frame " + std::to_string(t));
  }
}

int last_observed_frame(const AgentTrack& track, int t_obs) {
  for (int t = t_obs - 1; t >= 0; --t)
    if (track.present[t]) return t;
  return -1;
}

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json tracks = nlohmann::json::array();
  for (const AgentTrack& tr : s.tracks) {
    nlohmann::json positions = nlohmann::json::array();
    for (const Vec2& p : tr.positions) positions.push_back({p.x, p.y});
    nlohmann::json present = nlohmann::json::array();
    for (bool b : tr.present) present.push_back(b);
    tracks.push_back({{"agent_id", tr.agent_id},
                      {"category", tr.category},
                      {"positions", std::move(positions)},
                      {"present", std::move(present)}});
  }
  return {{"t_obs", s.t_obs},
          {"t_pred", s.t_pred},
          {"frame_dt", s.frame_dt},
          {"categories", s.categories},
          {"tracks", std::move(tracks)}};
}

Scenario scenario_from_json(const nlohmann::json& doc) {
  Scenario s;
  try {
    s.t_obs = doc.at("t_obs").get<int>();
    s.t_pred = doc.at("t_pred").get<int>();
    s.frame_dt = doc.at("frame_dt").get<double>();
    s.categories = doc.at("categories").get<std::vector<std::string>>();
    for (const auto& jt : doc.at("tracks")) {
      AgentTrack tr;
      tr.agent_id = jt.at("agent_id").get<std::int64_t>();
      tr.category = jt.at("category").get<int>();
      for (const auto& p : jt.at("positions")) {
        tr.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      tr.present = jt.at("present").get<std::vector<bool>>();
      s.tracks.push_back(std::move(tr));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scenario JSON: ") + e.what(), 0);
  }
  validate(s);
  return s;
}

std::vector<std::string> default_categories() { return {"vehicle", "pedestrian", "cyclist"}; }

}  // namespace unin::trajdata
