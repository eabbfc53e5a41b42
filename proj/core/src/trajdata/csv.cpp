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

#include "unin/trajdata/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "unin/errors.hpp"

namespace unin::trajdata {
namespace {

struct Row {
  std::int64_t frame;
  std::int64_t agent;
  int category;
  Vec2 pos;
  std::size_t line;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view field, const char* name, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(fmt::format("non-numeric {} field '{}'", name, field), line);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ParseError(fmt::format("non-finite {} field", name), line);
  }
  return value;
}

std::vector<std::string> parse_category_header(std::string_view comment) {
  // comment is the text after '#'
  comment = trim(comment);
  constexpr std::string_view kKey = "categories:";
  if (comment.substr(0, kKey.size()) != kKey) return {};
  std::vector<std::string> names;
  for (std::string_view n : split(comment.substr(kKey.size()), ',')) {
    if (!n.empty()) names.emplace_back(n);
  }
  return names;
}

}  // namespace

std::vector<Scenario> parse_csv(std::string_view text, const WindowOptions& options) {
  if (!(options.t_obs > 0 && options.t_obs < options.t_pred)) {
    throw ConfigError("window needs 0 < t_obs < t_pred");
  }
  const int stride = options.stride > 0 ? options.stride : options.t_pred;

  std::vector<std::string> categories;
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const std::string_view raw = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto names = parse_category_header(line.substr(1));
      if (!names.empty()) categories = std::move(names);
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 5) {
      throw ParseError(fmt::format("expected 5 fields, found {}", fields.size()), line_no);
    }
    Row row{parse_field<std::int64_t>(fields[0], "frame_id", line_no),
            parse_field<std::int64_t>(fields[1], "agent_id", line_no),
            parse_field<int>(fields[2], "category_id", line_no),
            {parse_field<double>(fields[3], "x", line_no), parse_field<double>(fields[4], "y", line_no)},
            line_no};
    if (!rows.empty() && row.frame < rows.back().frame) {
      throw ParseError("frame_id is not ascending", line_no);
    }
    if (row.category < 0) throw ParseError("negative category_id", line_no);
    if (!categories.empty() && static_cast<std::size_t>(row.category) >= categories.size()) {
      throw ParseError(fmt::format("category_id {} outside the declared table", row.category), line_no);
    }
    rows.push_back(row);
  }

  if (categories.empty()) {
    int max_cat = -1;
    for (const Row& r : rows) max_cat = std::max(max_cat, r.category);
    categories = default_categories();
    if (max_cat >= static_cast<int>(categories.size())) {
      categories.clear();
      for (int c = 0; c <= max_cat; ++c) categories.push_back("category" + std::to_string(c));
    }
  }

  std::vector<std::int64_t> frames;
  for (const Row& r : rows)
    if (frames.empty() || frames.back() != r.frame) frames.push_back(r.frame);

  // frame id -> first row index
  std::map<std::int64_t, std::size_t> frame_start;
  for (std::size_t i = 0; i < rows.size(); ++i) frame_start.try_emplace(rows[i].frame, i);

  std::vector<Scenario> scenarios;
  const auto n_frames = static_cast<std::int64_t>(frames.size());
  for (std::int64_t w0 = 0; w0 + options.t_pred <= n_frames; w0 += stride) {
    std::map<std::int64_t, AgentTrack> agents;
    for (int t = 0; t < options.t_pred; ++t) {
      const std::int64_t frame = frames[w0 + t];
      for (std::size_t i = frame_start[frame]; i < rows.size() && rows[i].frame == frame; ++i) {
        const Row& r = rows[i];
        auto [it, inserted] = agents.try_emplace(r.agent);
        AgentTrack& tr = it->second;
        if (inserted) {
          tr.agent_id = r.agent;
          tr.category = r.category;
          tr.positions.assign(options.t_pred, Vec2{});
          tr.present.assign(options.t_pred, false);
        }
        if (tr.present[t]) {
          throw ParseError(fmt::format("agent {} appears twice in frame {}", r.agent, frame), r.line);
        }
        tr.positions[t] = r.pos;
        tr.present[t] = true;
      }
    }
    Scenario s;
    s.t_obs = options.t_obs;
    s.t_pred = options.t_pred;
    s.frame_dt = options.frame_dt;
    s.categories = categories;
    for (auto& [id, tr] : agents) {
      const auto observed = std::count(tr.present.begin(), tr.present.begin() + options.t_obs, true);
      if (observed < options.t_obs) continue;
      s.tracks.push_back(std::move(tr));
    }
    if (s.tracks.empty()) continue;
    validate(s);
    scenarios.push_back(std::move(s));
  }
  if (scenarios.empty()) throw EmptyDatasetError("no scenario could be extracted from the CSV input");
  return scenarios;
}

std::vector<Scenario> load_csv(const std::filesystem::path& path, const WindowOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::vector<Scenario> load_csv_dir(const std::filesystem::path& dir, const WindowOptions& options) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) {
    auto part = load_csv(f, options);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  if (out.empty()) throw EmptyDatasetError("no scenario found under " + dir.string());
  return out;
}

std::string format_csv(const Scenario& scenario) {
  std::string out = "# categories: ";
  for (std::size_t c = 0; c < scenario.categories.size(); ++c) {
    if (c > 0) out += ",";
    out += scenario.categories[c];
  }
  out += "\n";
  for (int t = 0; t < scenario.t_pred; ++t) {
    for (const AgentTrack& tr : scenario.tracks) {
      if (!tr.present[t]) continue;
      out += fmt::format("{},{},{},{},{}\n", t, tr.agent_id, tr.category, tr.positions[t].x,
                         tr.positions[t].y);
    }
  }
  return out;
}

}  // namespace unin::trajdata
