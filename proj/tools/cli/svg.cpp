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

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace unin::cli {
namespace {

using trajdata::Vec2;

struct Viewport {
  double min_x, min_y, scale, off_x, off_y, height;

  Vec2 map(Vec2 p) const { return {off_x + (p.x - min_x) * scale, height - (off_y + (p.y - min_y) * scale)}; }
};

Viewport fit(const std::vector<Vec2>& points, const SvgOptions& o) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  for (const Vec2& p : points) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  }
  if (points.empty()) lo_x = lo_y = hi_x = hi_y = 0.0;
  const double inner_w = o.width * (1.0 - 2.0 * o.margin), inner_h = o.height * (1.0 - 2.0 * o.margin);
  const double span_x = std::max(hi_x - lo_x, 1e-9), span_y = std::max(hi_y - lo_y, 1e-9);
  // One scale for both axes so shapes are not distorted; the spare axis is centred.
  const double scale = std::min(inner_w / span_x, inner_h / span_y);
  return {lo_x,
          lo_y,
          scale,
          o.width * o.margin + 0.5 * (inner_w - span_x * scale),
          o.height * o.margin + 0.5 * (inner_h - span_y * scale),
          o.height};
}

std::string polyline(const std::vector<Vec2>& pts, const Viewport& vp, std::int64_t id, const char* stroke) {
  std::string coords;
  for (const Vec2& p : pts) {
    const Vec2 q = vp.map(p);
    coords += fmt::format("{}{:.2f},{:.2f}", coords.empty() ? "" : " ", q.x, q.y);
  }
  return fmt::format("    <polyline data-agent=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                     id, coords, stroke);
}

std::string density_color(double t) {
  const auto lerp = [t](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
  return fmt::format("#{:02x}{:02x}{:02x}", lerp(49, 215), lerp(54, 48), lerp(149, 39));
}

}  // namespace

std::string render_svg(const trajdata::Scenario& scenario, const std::vector<bool>& predicted,
                       const predictor::SampleSet& samples, const SvgOptions& options) {
  const std::size_t n = scenario.tracks.size();
  std::vector<std::vector<Vec2>> observed(n), truth(n);
  std::vector<Vec2> all;
  for (std::size_t a = 0; a < n; ++a) {
    if (!predicted[a]) continue;
    const auto& tr = scenario.tracks[a];
    for (int f = 0; f < scenario.t_pred; ++f) {
      if (!tr.present[static_cast<std::size_t>(f)]) continue;
      (f < scenario.t_obs ? observed[a] : truth[a]).push_back(tr.positions[static_cast<std::size_t>(f)]);
      all.push_back(tr.positions[static_cast<std::size_t>(f)]);
    }
  }
  for (const auto& s : samples)
    for (std::size_t a = 0; a < n; ++a)
      if (predicted[a]) all.insert(all.end(), s[a].begin(), s[a].end());
  const Viewport vp = fit(all, options);

  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "  <rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      options.width, options.height);

  out += "  <g id=\"observed\">\n";
  for (std::size_t a = 0; a < n; ++a)
    if (predicted[a]) out += polyline(observed[a], vp, scenario.tracks[a].agent_id, "#333333");
  out += "  </g>\n  <g id=\"truth\">\n";
  for (std::size_t a = 0; a < n; ++a)
    if (predicted[a] && !truth[a].empty()) out += polyline(truth[a], vp, scenario.tracks[a].agent_id, "#2ca02c");
  out += "  </g>\n  <g id=\"samples\">\n";
  if (!samples.empty()) {
    const double radius = 0.03 * std::min(options.width, options.height) / vp.scale;
    for (std::size_t a = 0; a < n; ++a) {
      if (!predicted[a]) continue;
      std::vector<Vec2> pts;
      for (const auto& s : samples) pts.insert(pts.end(), s[a].begin(), s[a].end());
      std::vector<double> density(pts.size(), 0.0);
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) density[i] += trajdata::distance(pts[i], pts[j]) <= radius ? 1.0 : 0.0;
      const double peak = *std::max_element(density.begin(), density.end());
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec2 q = vp.map(pts[i]);
        out += fmt::format("    <circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.6\"/>\n", q.x, q.y,
                           density_color(peak > 1.0 ? (density[i] - 1.0) / (peak - 1.0) : 0.0));
      }
    }
  }
  out += "  </g>\n</svg>\n";
  return out;
}

}  // namespace unin::cli
